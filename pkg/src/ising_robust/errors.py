"""Exception hierarchy shared across the package.

Every error carries a stable machine-readable ``name`` (its class name) so the
CLI can report failures in a greppable ``NAME: detail`` form.
"""


class IsingRobustError(Exception):
    """Base class for all domain errors raised by this package."""

    @property
    def name(self) -> str:
        return type(self).__name__


class InvalidSpec(IsingRobustError):
    """A builder or settings object received out-of-range parameters."""


class EmptyGraph(IsingRobustError):
    """A random ensemble draw produced a graph with no edges."""


class ParseError(IsingRobustError):
    """A text input (edge list, spin file, config) is malformed."""


class AsymmetryConflict(IsingRobustError):
    """Duplicate (i, j)/(j, i) entries disagree on the edge weight."""


class IndexOutOfRange(IsingRobustError):
    """A node index lies outside [0, n)."""


class DimensionMismatch(IsingRobustError):
    """A spin configuration's length differs from the graph size."""


class TooLargeForEnumeration(IsingRobustError):
    """Exact enumeration requested above the supported node-count cap."""


class LambdaZero(IsingRobustError):
    """The divergence objective needs lambda > 0; use the likelihood limit."""


class DegenerateDenominator(IsingRobustError):
    """The sensitivity denominator is exactly zero for this sample."""


class NoUsableTrainingFits(IsingRobustError):
    """No training sample produced an interior estimate to average."""


class UsageError(IsingRobustError):
    """Command-line arguments are structurally invalid."""
