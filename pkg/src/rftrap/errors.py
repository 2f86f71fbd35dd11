"""Exception hierarchy.

Two branches matter for callers: :class:`InputError` for bad user input
(the CLI exits with code 2) and :class:`PhysicsError` for failures that
occur while solving a well-formed problem, e.g. no trap minimum or a
non-converging grid solve (the CLI exits with code 3).
"""


class TrapToolkitError(Exception):
    """Base class for all toolkit errors."""


class InputError(TrapToolkitError):
    """Invalid input data or configuration."""


class ValidationError(InputError):
    """A declarative object violates its invariants."""


class CatalogError(InputError):
    """Unknown ion species name."""


class ConfigurationError(InputError):
    """Unusable numeric configuration (step sizes, guards, ranges)."""


class DomainError(InputError):
    """Evaluation point outside a function's domain."""


class UnknownElectrodeError(InputError):
    """Voltage or basis lookup referenced a missing electrode id."""


class InsufficientDataError(InputError):
    """Too few data points for the requested fit."""


class DegenerateCircuitError(InputError):
    """Circuit parameters make the impedance expression singular."""


class PhysicsError(TrapToolkitError):
    """A well-posed computation failed for physical/numerical reasons."""


class ConvergenceError(PhysicsError):
    """Iterative solver did not reach tolerance."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class SearchError(PhysicsError):
    """Minimum/saddle search failed in the given region."""


class AmbiguousMinimumError(SearchError):
    """More than one distinct local minimum found; carries all of them."""

    def __init__(self, message, points):
        super().__init__(message)
        self.points = points


class UnstableConfigurationError(PhysicsError):
    """Effective potential is not confining; carries the escape direction."""

    def __init__(self, message, direction=None):
        super().__init__(message)
        self.direction = direction


class UnboundedRegionError(PhysicsError):
    """No turning point of the potential inside the search region."""


class UncompensatableDirectionError(PhysicsError):
    """Compensation basis cannot span the stray-field direction."""

    def __init__(self, message, direction=None):
        super().__init__(message)
        self.direction = direction


class AnalysisError(PhysicsError):
    """Signal analysis failed (e.g. no spectral peak where expected)."""
