"""Exception types shared across the package."""


class PairFormatError(ValueError):
    """A channel-pair file or object is malformed or fails validation."""


class AlphabetCapError(RuntimeError):
    """A transformed pair would exceed the configured output-alphabet cap."""

    def __init__(self, message, step=None, size=None):
        super().__init__(message)
        self.step = step
        self.size = size


class NonConvergenceError(RuntimeError):
    """A numerical routine failed to converge."""
