"""Utilities: configuration loading, JSON encoding, tensor files and diagnostic figures."""
