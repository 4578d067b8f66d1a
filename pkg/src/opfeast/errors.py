"""Exception types shared across the library."""


class OpfeastError(Exception):
    """Base class for all library-specific errors."""


class DomainError(OpfeastError):
    """A point lies outside the interval a function is defined on."""


class DomainMismatchError(OpfeastError):
    """Two function objects live on different intervals."""


class ResolutionFailureError(OpfeastError):
    """Adaptive refinement hit the degree cap without resolving the target.

    Attributes:
        max_degree: the cap that was exhausted.
    """

    def __init__(self, message, max_degree):
        super().__init__(f"{message} (degree cap {max_degree} exceeded)")
        self.max_degree = max_degree


class IllConditionedShiftError(OpfeastError):
    """A shifted solve blew up: the shift sits (numerically) on the spectrum.

    Attributes:
        condition_estimate: crude resolvent-norm estimate ||g|| / ||f||.
        node_index: quadrature-node index when raised inside a filter sweep.
    """

    def __init__(self, message, condition_estimate, node_index=None):
        if node_index is not None:
            message = f"{message} [filter node {node_index}]"
        super().__init__(message)
        self.condition_estimate = condition_estimate
        self.node_index = node_index


class PoleProximityError(OpfeastError):
    """A filter was evaluated within 1e-12 of one of its poles."""


class StagnationError(OpfeastError):
    """Subspace iteration stopped making progress.

    Usual fixes: increase the quadrature degree of the filter (ell) or the
    subspace dimension (m).  The partial result at the stall is attached as
    `result` for diagnostics.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class RankCollapseError(OpfeastError):
    """Rank adaptation removed every column of the iteration subspace."""


class ConfigError(OpfeastError):
    """A run configuration failed to parse or validate."""
