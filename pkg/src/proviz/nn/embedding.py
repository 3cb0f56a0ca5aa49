"""Text embedding providers for the utterance classifier.

The default provider is a seeded feature-hashing bag of words: every token
hashes to one of n buckets with a ±1 sign, and the vector is L2-normalized.
It is fully deterministic (keyed blake2b, no interpreter hash randomization)
so training and classification reproduce bit-for-bit across runs and
machines. Remote embedding services can be plugged in behind the same
interface.
"""

from __future__ import annotations

import hashlib
import re
from typing import Protocol

import numpy as np

__all__ = ["EmbeddingProvider", "HashingEmbedder", "tokenize", "DEFAULT_DIMENSION"]

DEFAULT_DIMENSION = 256

_TOKEN = re.compile(r"[a-z0-9']+")


def tokenize(text: str) -> list[str]:
    return _TOKEN.findall(text.lower())


class EmbeddingProvider(Protocol):
    dimension: int

    def embed(self, text: str) -> np.ndarray: ...


class HashingEmbedder:
    def __init__(self, dimension: int = DEFAULT_DIMENSION, seed: int = 0):
        if dimension <= 0:
            raise ValueError("embedding dimension must be positive")
        self.dimension = dimension
        self.seed = seed
        self._key = seed.to_bytes(8, "little", signed=True)

    def embed(self, text: str) -> np.ndarray:
        vec = np.zeros(self.dimension)
        for token in tokenize(text):
            h = int.from_bytes(
                hashlib.blake2b(token.encode("utf-8"), digest_size=8, key=self._key).digest(),
                "little",
            )
            sign = 1.0 if h & (1 << 63) else -1.0
            vec[h % self.dimension] += sign
        norm = float(np.linalg.norm(vec))
        if norm > 0.0:
            vec /= norm
        return vec

    def embed_batch(self, texts: list[str]) -> np.ndarray:
        out = np.empty((len(texts), self.dimension))
        for i, text in enumerate(texts):
            out[i] = self.embed(text)
        return out
