"""Raw-text preprocessing for the collodb toolkit.

Converts plain text (one sentence per line) into the three files the
collostruction miner ingests: a dependency-parsed corpus, a sentence
embedding table, and a word embedding table, plus optional per-verb
sample sentences.
"""

from .config import AdapterConfig, load_config
from .errors import AdapterError, ConfigError, ModelError
from .pipeline import Report, preprocess

__all__ = [
    "AdapterConfig",
    "AdapterError",
    "ConfigError",
    "ModelError",
    "Report",
    "load_config",
    "preprocess",
]
