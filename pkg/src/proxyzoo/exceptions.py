"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Inputs violate a documented precondition (bad data, bad config)."""


class BranchCutError(RuntimeError):
    """Rotation logarithm undefined: an eigenvalue sits at -1 (angle pi)."""


class InfeasibleRegionError(RuntimeError):
    """No point satisfies the requested constraint set."""
