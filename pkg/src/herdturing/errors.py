"""Exception hierarchy shared by the analysis modules and the CLI."""


class HerdTuringError(Exception):
    """Base class for every error raised by this package."""

    exit_code = 1


class AdmissibilityError(HerdTuringError, ValueError):
    """A parameter vector violates one of its admissibility bounds."""

    exit_code = 2

    def __init__(self, bound: str, detail: str = ""):
        self.bound = bound
        msg = f"admissibility violated: {bound}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class ConfigError(HerdTuringError, ValueError):
    """Malformed configuration; ``path`` is a JSON-pointer to the culprit."""

    exit_code = 2

    def __init__(self, path: str, message: str):
        self.path = path or "/"
        super().__init__(f"{self.path}: {message}")


class DomainError(HerdTuringError, ValueError):
    """Argument outside the mathematical domain (e.g. negative density)."""

    exit_code = 3


class PreconditionError(HerdTuringError, ValueError):
    """An operation was called at a point where its hypotheses do not hold."""

    exit_code = 3


class DegeneracyError(HerdTuringError, ArithmeticError):
    """A quantity required to be nonzero (or a matrix required to be
    invertible) vanished."""

    exit_code = 3


class InstabilityError(HerdTuringError, FloatingPointError):
    """Time integration left the admissible region; usually dt is too large."""

    exit_code = 3


class ToleranceFailure(HerdTuringError):
    """A reproduced value differs from its reference by more than allowed."""

    exit_code = 4
