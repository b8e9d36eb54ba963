"""Exception types shared across the package.

The CLI maps these onto exit codes: ``DomainError`` and ``ConfigError`` exit
with status 1, ``NumericalBlowup`` with status 2.
"""


class DomainError(ValueError):
    """An argument lies outside the domain where the operation is defined."""


class ConfigError(ValueError):
    """A grid, config file or override is inconsistent or unknown."""


class NumericalBlowup(ArithmeticError):
    """The explicit scheme produced a non-finite value."""

    def __init__(self, message, step=None, path_index=None):
        super().__init__(message)
        self.step = step
        self.path_index = path_index
