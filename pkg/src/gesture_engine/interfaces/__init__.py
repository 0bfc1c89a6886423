"""Interface classes shared between the engine components."""
