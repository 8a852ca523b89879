"""Embedding backends.

The default is a hashing embedder: each word's vector is drawn from a
Gaussian seeded by a keyed blake2b digest of the word, so vectors are
deterministic across runs and platforms without any model download.
Sentence vectors are the normalized mean of their token vectors.  A
sentence-transformers backend can be selected when that ecosystem is
installed.
"""

from __future__ import annotations

import hashlib

import numpy as np

from .errors import ConfigError, ModelError


class HashingEmbedder:
    def __init__(self, dim: int, seed: int):
        self.dim = dim
        self._key = str(seed).encode("ascii")

    def word_vector(self, word: str) -> np.ndarray:
        digest = hashlib.blake2b(word.encode("utf-8"), digest_size=8, key=self._key).digest()
        rng = np.random.default_rng(int.from_bytes(digest, "big"))
        vec = rng.standard_normal(self.dim)
        return vec / np.linalg.norm(vec)

    def sentence_vector(self, tokens: list[str]) -> np.ndarray:
        if not tokens:
            return self.word_vector("")  # degenerate but non-zero
        mean = np.mean([self.word_vector(t.lower()) for t in tokens], axis=0)
        norm = float(np.linalg.norm(mean))
        if norm < 1e-12:
            return self.word_vector(" ".join(tokens))
        return mean / norm


class TransformerEmbedder:
    """Adapter around a pretrained sentence-transformers model."""

    def __init__(self, dim: int, model: str):
        if not model:
            raise ConfigError("the transformer backend needs a model name")
        try:
            from sentence_transformers import SentenceTransformer
        except ImportError as exc:
            raise ModelError(f"sentence-transformers is not installed: {exc}") from None
        try:
            self._model = SentenceTransformer(model)
        except Exception as exc:
            raise ModelError(f"cannot load embedding model {model!r}: {exc}") from None
        self.dim = self._model.get_sentence_embedding_dimension()

    def _encode(self, text: str) -> np.ndarray:
        vec = np.asarray(self._model.encode([text])[0], dtype=np.float64)
        norm = float(np.linalg.norm(vec))
        if norm == 0.0:
            raise ModelError(f"model produced a zero vector for {text!r}")
        return vec / norm

    def word_vector(self, word: str) -> np.ndarray:
        return self._encode(word)

    def sentence_vector(self, tokens: list[str]) -> np.ndarray:
        return self._encode(" ".join(tokens))


def make_embedder(name: str, *, dim: int, seed: int, model: str = ""):
    if name == "hashing":
        return HashingEmbedder(dim, seed)
    if name == "transformer":
        return TransformerEmbedder(dim, model)
    raise ConfigError(f"unknown embedder backend {name!r}")
