"""Exception hierarchy shared across the toolkit."""


class BgcamError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(BgcamError):
    """A config does not match the data it is applied to."""


class ContractError(BgcamError):
    """An operation was called with arguments violating its contract."""


class CorruptStreamError(BgcamError):
    """An event-stream file failed structural validation."""


class UndefinedRatioError(BgcamError):
    """A ratio whose denominator is zero was requested."""
