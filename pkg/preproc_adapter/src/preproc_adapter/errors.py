"""Exception types raised by the adapter."""


class AdapterError(Exception):
    """Base class for all adapter failures."""


class ConfigError(AdapterError):
    """A configuration file or value is invalid."""


class ModelError(AdapterError):
    """A pretrained parser or embedding model could not be loaded."""
