"""Exception hierarchy shared across the package.

The CLI maps these onto process exit codes: configuration problems exit
with 1, numerical/internal-consistency failures with 2, I/O failures
with 3.
"""


class VflcostError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(VflcostError, ValueError):
    """Invalid experiment configuration or invalid operation inputs."""


class InternalConsistencyError(VflcostError, ArithmeticError):
    """A mathematical identity that must hold numerically was violated.

    Raised e.g. when an information metric comes out more negative than
    the clamping tolerance, or when two computation routes that must
    agree do not.
    """


class EnumerationLimitError(VflcostError, RuntimeError):
    """The exact enumeration would exceed the configured term budget."""


class OutputError(VflcostError, OSError):
    """Writing a result file failed."""
