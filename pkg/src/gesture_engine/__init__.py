"""Gesture engine package init file."""
