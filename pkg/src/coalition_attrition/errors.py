"""Exception hierarchy shared by every module."""


class GameError(ValueError):
    """Base class for all domain errors raised by this package."""


class NegativeEffort(GameError):
    pass


class DegenerateProfile(GameError):
    """Total effective effort is zero, so shares are undefined."""


class DegenerateScenario(GameError):
    """Total power across all coalitions is zero."""


class EmptyCandidates(GameError):
    pass


class InvariantViolation(GameError):
    pass


class UnknownPlayer(GameError):
    pass


class InvalidConfig(GameError):
    pass


class UnsupportedCost(GameError):
    pass


class InvalidPrize(GameError):
    pass


class GridTooCoarse(InvalidConfig):
    pass


class GridMismatch(GameError):
    pass


class NotOnSimplex(GameError):
    pass


class NegativeMass(GameError):
    pass


class NegativeMassWarning(UserWarning):
    """A replicator step overshot below zero and was clamped."""


class TooManyPlayers(GameError):
    pass


class MissingSubsetValue(GameError):
    pass


class LengthMismatch(GameError):
    pass


class MissingEffectiveness(GameError):
    pass


class InsufficientData(GameError):
    pass


class ZeroVolatility(GameError):
    pass


class UnassignedAsset(GameError):
    pass


class DuplicateAsset(GameError):
    pass


class EmptyYear(GameError):
    pass


class UnknownSelector(GameError):
    pass


class SchemaError(GameError):
    pass
