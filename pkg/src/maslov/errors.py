"""Exception types shared across the library."""


class MaslovError(Exception):
    """Base class for all library errors."""


class InvariantViolation(MaslovError):
    """An input failed a structural residual check (unitarity, isotropy, ...)."""


class DimensionMismatch(MaslovError):
    """Operands live over different phase-space dimensions."""


class TransversalityError(MaslovError):
    """A pair of Lagrangians required to be transverse is not."""


class ConditioningError(MaslovError):
    """A value failed to round to an integer, or a deterministic search degenerated."""


class SamplingError(MaslovError):
    """Path sampling is too coarse and refinement was exhausted."""


class StateDomainError(MaslovError):
    """A Gaussian state left its validity domain (Re M positive definite)."""


class CaseError(MaslovError):
    """Endpoint configuration outside the supported cases."""


class ImmersionError(MaslovError):
    """Chart Jacobian is rank deficient at a sampled parameter."""


class SpecError(MaslovError):
    """Experiment specification is malformed; carries the offending field path."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")
