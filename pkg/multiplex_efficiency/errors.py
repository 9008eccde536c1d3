"""
Exception hierarchy shared by the library and the command-line runner.

The runner maps each family onto an exit code (see ``cli.EXIT_CODES``).
"""

from typing import List, Optional

import numpy as np


class MultiplexError(Exception):
    """Base class for every error raised by multiplex_efficiency"""


class InvalidNetworkError(MultiplexError, ValueError):
    """A model invariant was violated (negative weight, self loop, bad shape, ...)"""


class DataFormatError(MultiplexError):
    """An input file could not be parsed"""

    def __init__(self, reason: str, path: Optional[str] = None,
                 line_number: Optional[int] = None):
        self.reason = reason
        self.path = path
        self.line_number = line_number
        location = ""
        if path is not None:
            location = f"{path}:"
            if line_number is not None:
                location += f"{line_number}:"
            location += " "
        super().__init__(f"{location}{reason}")


class ConfigError(MultiplexError):
    """A run configuration failed validation; holds every individual problem"""

    def __init__(self, errors: List[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class NumericalError(MultiplexError):
    """A numerical procedure could not produce a trustworthy answer"""


class ReducibleMatrixError(NumericalError):
    """The matrix has no unique positive Perron vector"""


class PerronConvergenceError(NumericalError):
    """Power iteration did not reach the requested residual"""

    def __init__(self, message: str, x: np.ndarray, y: np.ndarray,
                 residual: float, iterations: int):
        self.x = x
        self.y = y
        self.residual = residual
        self.iterations = iterations
        super().__init__(f"{message} (residual {residual:.3e} after {iterations} iterations)")


class SelectionError(MultiplexError):
    """No admissible vertex pair or layer is available for strengthening"""


class UsageError(MultiplexError):
    """Command-line usage problem"""
