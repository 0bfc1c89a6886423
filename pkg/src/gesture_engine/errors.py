"""Exception types raised by the gesture engine.

All validation errors derive from ``ValueError`` and all file errors from ``OSError``,
the command line interface maps these two families to its exit codes.
"""


class BvhParseError(ValueError):
    """Malformed BVH document."""

    def __init__(self, message: str, line_number: int | None = None):
        """Construct parse error.

        Parameters
        ----------
        message
            Description of the problem
        line_number, optional
            One-based line number in the BVH document, by default None
        """
        self.line_number = line_number
        prefix = f"line {line_number}: " if line_number is not None else ""
        super().__init__(prefix + message)


class ConfigValidationError(ValueError):
    """A configuration value violates the precondition of the module using it."""


class TensorFileError(ValueError):
    """Invalid tensor file or checkpoint container."""


class TrainingDivergedError(FloatingPointError):
    """Training produced a non-finite loss."""

    def __init__(self, step: int, loss_curve: list[float]):
        """Construct divergence report.

        Parameters
        ----------
        step
            Training step at which the loss became non-finite
        loss_curve
            Losses recorded up to and including the failing step
        """
        self.step = step
        self.loss_curve = loss_curve
        last = loss_curve[-1] if loss_curve else float("nan")
        super().__init__(f"Training diverged at step {step}: loss = {last}")
