"""Adapter configuration: a dataclass plus a flat key=value file reader."""

from __future__ import annotations

import os
from dataclasses import dataclass, field, fields

from .errors import ConfigError


@dataclass
class AdapterConfig:
    """Everything one preprocessing run needs.

    inputs are raw text files, one sentence per line.  The three *_out
    paths receive the parsed corpus and the two embedding tables; samples_out
    is optional and receives per-verb example sentences when set.
    """

    inputs: list[str] = field(default_factory=list)
    corpus_out: str = ""
    sentence_vectors_out: str = ""
    word_vectors_out: str = ""
    samples_out: str = ""
    verbs: list[str] = field(default_factory=list)
    sample_cap: int = 10
    dim: int = 64
    seed: int = 13
    max_tokens: int = 120  # sentences longer than this are skipped, not truncated
    parser: str = "rules"
    embedder: str = "hashing"
    model: str = ""  # backend-specific model name, unused by the built-in backends

    def validate(self) -> None:
        if not self.inputs:
            raise ConfigError("at least one input file is required")
        for path in self.inputs:
            if not os.path.isfile(path):
                raise ConfigError(f"input file not found: {path}")
        required = {
            "corpus_out": self.corpus_out,
            "sentence_vectors_out": self.sentence_vectors_out,
            "word_vectors_out": self.word_vectors_out,
        }
        for name, path in required.items():
            if not path:
                raise ConfigError(f"{name} is required")
        for path in [*required.values()] + ([self.samples_out] if self.samples_out else []):
            parent = os.path.dirname(os.path.abspath(path))
            if not os.path.isdir(parent):
                raise ConfigError(f"output directory does not exist: {parent}")
            if not os.access(parent, os.W_OK):
                raise ConfigError(f"output directory is not writable: {parent}")
        if self.sample_cap < 1:
            raise ConfigError(f"sample_cap must be >= 1, got {self.sample_cap}")
        if self.dim < 8:
            raise ConfigError(f"dim must be >= 8, got {self.dim}")  # tiny dims collide too often
        if self.max_tokens < 1:
            raise ConfigError(f"max_tokens must be >= 1, got {self.max_tokens}")


_LIST_KEYS = {"inputs", "verbs"}
_INT_KEYS = {"sample_cap", "dim", "seed", "max_tokens"}


def load_config(path: str) -> AdapterConfig:
    """Read `key = value` lines into a validated AdapterConfig.

    Blank lines and `#` comments are ignored.  List-valued keys take
    comma-separated entries.  Unknown keys are an error rather than a
    silent no-op.
    """
    known = {f.name for f in fields(AdapterConfig)}
    values: dict[str, object] = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from None
    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"line {line_no}: expected 'key = value', got {line!r}")
        key = key.strip()
        value = value.strip()
        if key not in known:
            raise ConfigError(f"line {line_no}: unknown key {key!r}")
        if key in _LIST_KEYS:
            values[key] = [item.strip() for item in value.split(",") if item.strip()]
        elif key in _INT_KEYS:
            try:
                values[key] = int(value)
            except ValueError:
                raise ConfigError(f"line {line_no}: {key} expects an integer, got {value!r}") from None
        else:
            values[key] = value
    config = AdapterConfig(**values)
    config.validate()
    return config
