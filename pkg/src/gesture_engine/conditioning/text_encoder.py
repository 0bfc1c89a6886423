"""Text embedding behind a pluggable encoder interface."""
import hashlib
import logging
from functools import lru_cache
from typing import Protocol

import numpy as np

from gesture_engine.interfaces.interface_condition_bundle import TEXT_EMBEDDING_DIM

log = logging.getLogger("TextEnc")

MAX_TEXT_TOKENS: int = 20


class TextEncoder(Protocol):
    """Interface of a text encoder mapping a token list to a fixed-size embedding."""

    dim: int

    def encode(self, tokens: list[str]) -> np.ndarray:
        """Return the embedding of a non-empty token list, shape (dim,)."""
        ...


@lru_cache(maxsize=4096)
def _token_vector(token: str, dim: int) -> np.ndarray:
    digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest()
    rng = np.random.default_rng(int.from_bytes(digest, "little"))
    vector = rng.standard_normal(dim)
    vector.setflags(write=False)
    return vector


class HashingTextEncoder:
    """Deterministic offline text encoder.

    Every lower-cased token is hashed to seed a Gaussian vector, high-dimensional Gaussian vectors are
    nearly orthogonal. The embedding is the L2-normalized sum of the token vectors.
    """

    def __init__(self, dim: int = TEXT_EMBEDDING_DIM):
        """Construct hashing encoder.

        Parameters
        ----------
        dim, optional
            Embedding dimension, by default 512
        """
        if dim < 1:
            raise ValueError(f"Embedding dimension must be positive, got {dim}")
        self.dim = dim

    def encode(self, tokens: list[str]) -> np.ndarray:
        """Return the normalized bag-of-tokens embedding."""
        total = np.sum([_token_vector(token.lower(), self.dim) for token in tokens], axis=0)
        norm = np.linalg.norm(total)
        return total / norm if norm > 0 else np.zeros(self.dim)


def embed_text(text: str, encoder: TextEncoder | None = None, max_tokens: int = MAX_TEXT_TOKENS) -> np.ndarray:
    """Embed a text description.

    Parameters
    ----------
    text
        Description, tokenized at whitespace
    encoder, optional
        Text encoder, by default ``HashingTextEncoder()``
    max_tokens, optional
        Maximum number of tokens, longer input is truncated with a warning, by default 20

    Returns
    -------
        Embedding vector, the zero vector for empty text
    """
    encoder = encoder or HashingTextEncoder()
    tokens = text.split()
    if not tokens:
        return np.zeros(encoder.dim)
    if len(tokens) > max_tokens:
        log.warning("Text has %d tokens, truncated to %d: %r", len(tokens), max_tokens, text)
        tokens = tokens[:max_tokens]
    embedding = np.asarray(encoder.encode(tokens), dtype=float)
    if embedding.shape != (encoder.dim,):
        raise ValueError(f"Text encoder returned shape {embedding.shape}, expected ({encoder.dim},)")
    return embedding
