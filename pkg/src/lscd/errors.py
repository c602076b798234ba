"""Exception types shared across the library.

Every error carries an ``exit_code`` so the CLI can map failures onto its
contract: 1 = validation error, 2 = I/O / malformed data, 3 = numerical
failure. Plain ``OSError`` from unreadable files is mapped to 2 as well.
"""


class LscdError(Exception):
    exit_code = 1


class ParameterError(LscdError):
    """An argument or configuration value is invalid."""

    exit_code = 1


class ConfigError(ParameterError):
    """A pipeline configuration failed compatibility validation."""


class EmptySpaceError(ParameterError):
    """A vector space would end up with no rows."""


class MissingWordError(LscdError):
    """A requested word is absent from a space or corpus."""

    exit_code = 1


class FormatError(LscdError):
    """An input file does not follow its declared format."""

    exit_code = 2


class NumericalError(LscdError):
    """A numerical operation has no defined result for these inputs."""

    exit_code = 3


class AlignmentError(NumericalError):
    """Two spaces cannot be placed into a common coordinate system."""


class DegenerateDistributionError(NumericalError):
    """A vector or matrix carries no probability mass."""


class UndefinedDistanceError(NumericalError):
    """A distance is undefined, e.g. a cosine against a zero vector."""


class EvaluationError(NumericalError):
    """A rank correlation is undefined for the given inputs."""
