"""Test text embedding."""
import logging

import numpy as np
import pytest

from gesture_engine.conditioning.text_encoder import HashingTextEncoder, embed_text


def test_empty_text():
    """Test that empty text maps to the zero vector."""
    assert not np.any(embed_text(""))
    assert embed_text("   ").shape == (512,)


def test_embedding_properties():
    """Test determinism, normalization and case folding of the hashing encoder."""
    first = embed_text("a person waves with the right hand")
    second = embed_text("a person waves with the right hand")
    np.testing.assert_array_equal(first, second)
    assert np.linalg.norm(first) == pytest.approx(1.0)
    np.testing.assert_allclose(embed_text("A Person Waves"), embed_text("a person waves"))
    assert first @ embed_text("a person walks forward") < 0.99


def test_encoder_dimension():
    """Test custom embedding dimensions."""
    encoder = HashingTextEncoder(dim=16)
    assert embed_text("walk", encoder).shape == (16,)
    with pytest.raises(ValueError):
        HashingTextEncoder(dim=0)


def test_truncation(caplog):
    """Test that long descriptions are truncated to the token limit with a warning."""
    tokens = [f"word{k}" for k in range(25)]
    with caplog.at_level(logging.WARNING):
        embedding = embed_text(" ".join(tokens))
    assert "truncated to 20" in caplog.text
    np.testing.assert_allclose(embedding, embed_text(" ".join(tokens[:20])))


def test_encoder_shape_check():
    """Test that encoders returning the wrong shape are rejected."""

    class BrokenEncoder:
        dim = 8

        def encode(self, tokens):
            return np.ones(4)

    with pytest.raises(ValueError):
        embed_text("walk", BrokenEncoder())
