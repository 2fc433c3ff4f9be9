"""
Exception hierarchy shared by the core modules and the experiment harness
"""

from typing import Optional


class LiftFunnelError(Exception):
    """Base class for all library errors"""
    pass


class ValidationError(LiftFunnelError):
    """Raised when an input distribution or parameter is invalid"""
    pass


class NegativeEntry(ValidationError):
    """Raised when a probability entry is negative"""
    pass


class NotNormalized(ValidationError):
    """Raised when probabilities do not sum to one"""
    pass


class ZeroMarginal(ValidationError):
    """Raised when a marginal P_S(s) or P_X(x) vanishes"""
    pass


class DimensionMismatch(ValidationError):
    """Raised when alphabet sizes disagree"""
    pass


class MixtureMismatch(ValidationError):
    """Raised when a mechanism does not mix back to P_X"""
    pass


class InvalidBound(ValidationError):
    """Raised when a lift bound is not strictly greater than one"""
    pass


class OutOfRange(ValidationError):
    """Raised when a privacy budget lies outside the supported range"""
    pass


class EmptyVertexSet(LiftFunnelError):
    """Raised when vertex enumeration produces nothing"""
    pass


class LPError(LiftFunnelError):
    """Raised when the mixture linear program cannot be solved"""
    pass


class Infeasible(LPError):
    """Raised when no convex combination of candidates reproduces the target"""
    pass


class RejectionOverflow(LiftFunnelError):
    """Raised when random instance generation keeps rejecting draws"""
    pass


class ConfigError(LiftFunnelError):
    """Raised when an experiment configuration is invalid"""
    pass


class InstanceFailed(LiftFunnelError):
    """Raised when one instance of a sweep fails"""

    def __init__(self, instance_id: int, seed: int, cause: Optional[BaseException] = None):
        self.instance_id = instance_id
        self.seed = seed
        self.cause = cause
        super().__init__(f"Instance {instance_id} (seed {seed}) failed: {cause}")

    def __reduce__(self):
        return (self.__class__, (self.instance_id, self.seed, self.cause))
