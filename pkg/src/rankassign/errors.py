"""Exception types shared across the package."""


class RankAssignError(Exception):
    """Base class for all domain errors raised by this package."""


class ShapeMismatch(RankAssignError):
    """Array sizes disagree with the declared track/measurement counts."""


class InvalidEntry(RankAssignError):
    """A cost entry is NaN (rejected everywhere)."""


class NonFiniteMisdetect(RankAssignError):
    """A misdetection cost is infinite or NaN; every track must be misdetectable."""


class InfiniteEntry(RankAssignError):
    """A referenced cost entry is the gating sentinel (infinity)."""


class OracleLimitExceeded(RankAssignError):
    """Instance too large for the brute-force enumeration oracle."""


class Infeasible(RankAssignError):
    """Constraints admit no valid assignment."""


class MissingPredictions(RankAssignError):
    """No prediction data found for a requested instance."""


class ManifestMismatch(RankAssignError):
    """Prediction or graph data is inconsistent with the instance it claims to match."""
