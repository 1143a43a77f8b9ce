"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes: configuration problems exit with 2,
unreadable or malformed input files with 3, numeric failures with 4.
"""


class HolomimoError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(HolomimoError, ValueError):
    """An argument violates an operation's precondition."""


class DegenerateInputError(InvalidArgumentError):
    """Input is well-formed but carries no usable signal (zero power, zero matrix)."""


class NumericError(HolomimoError, ArithmeticError):
    """A numerical result violates an invariant (e.g. strongly negative eigenvalue)."""


class ConfigError(HolomimoError):
    """Configuration document failed validation.

    ``path`` is the JSON path of the offending field, e.g. ``variants[1].spacing``.
    """

    def __init__(self, message, path=""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class InputFileError(HolomimoError):
    """Base for errors raised while reading an input file.

    ``line`` is the 1-based line number where the problem was detected, or
    ``None`` when the problem concerns the whole file.
    """

    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = []
        if path is not None:
            where.append(str(path))
        if line is not None:
            where.append(f"line {line}")
        prefix = ":".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class ParseError(InputFileError):
    """Text could not be tokenized or a mandatory element is missing."""


class FormatError(InputFileError):
    """Text parsed but violates the structural rules of the format."""


class DataError(InputFileError):
    """Structure is valid but values are not (NaN, Inf, ...)."""


class UnsupportedVersionError(InputFileError):
    """File uses a format revision this package does not read."""


class OutputError(HolomimoError, OSError):
    """A writer refused to produce an output file."""
