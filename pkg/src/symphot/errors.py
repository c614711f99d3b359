"""Exception types raised by the engine.

Every failure mode gets its own class so callers can react to precision
problems, capacity blow-ups and physically empty branches separately.
"""


class SymphotError(Exception):
    """Base class for all engine errors."""


class InvalidEnvelopeError(SymphotError):
    """Envelope parameters are unusable (non-positive width, non-finite values,
    or a grid that cannot hold the requested function)."""


class PrecisionError(SymphotError):
    """A numerical routine could not reach its accuracy target."""


class CapacityError(SymphotError):
    """A polynomial grew past the configured term cap."""


class CcrViolationError(SymphotError):
    """A device map does not preserve the commutation relations."""


class StateValidationError(SymphotError):
    """Arguments violate a documented precondition."""


class ZeroNormError(SymphotError):
    """Normalization of a (numerically) zero vector was requested."""


class ZeroProbabilityError(SymphotError):
    """A conditional post-measurement state was requested for an outcome
    of (numerically) zero probability."""


class FullyBlockedError(SymphotError):
    """A filter transmits nothing, so the transmitted component cannot be
    post-selected."""
