"""Exception types shared across the simulator."""


class PlatoonSimError(Exception):
    """Base class for all platoonsim errors."""


class EmptyTrace(PlatoonSimError):
    """Raised when a trip trace has no usable rows."""


class RouteTooShort(PlatoonSimError):
    """Raised when a trace is too short to derive a route from."""


class OutOfRoute(PlatoonSimError):
    """Raised when an arc-length position falls outside the route."""


class UnknownQuantity(PlatoonSimError):
    """Raised for an emission quantity the coefficient table does not cover."""


class UndefinedRatio(PlatoonSimError):
    """Raised when the CO2/fuel cross-check is undefined (zero fuel)."""


class RefusesComparison(PlatoonSimError):
    """Raised when scenario results cannot be compared (unfinished vehicles)."""


class ConfigError(PlatoonSimError):
    """Raised for malformed scenario configs, route files or coefficient files."""
