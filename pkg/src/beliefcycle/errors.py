"""Exception hierarchy shared across the package."""


class BeliefCycleError(Exception):
    """Base class for all package-specific errors."""


class IllPosed(BeliefCycleError):
    """The structural parameters make the steady state undefined (1 - c - w^2*d*h <= 0)."""


class NonFinite(BeliefCycleError):
    """A map evaluation produced a non-finite component."""


class RootNotBracketed(BeliefCycleError):
    """A bracketed root solve found no sign change inside its interval."""


class NotASteadyState(BeliefCycleError):
    """A state handed to a local-analysis routine fails the fixed-point residual check."""


class OutOfDomain(BeliefCycleError):
    """An argument lies outside the mathematical domain of the operation."""


class TargetAbsent(BeliefCycleError):
    """The requested steady state does not exist anywhere on the scanned range."""


class DivergentOrbit(BeliefCycleError):
    """The base orbit diverged before the requested computation finished."""


class DegenerateSeries(BeliefCycleError):
    """A statistic is undefined for this series (zero variance or too few entries)."""


class TooShort(BeliefCycleError):
    """The input series is too short for the requested operation."""
