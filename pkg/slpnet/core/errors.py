"""Exception hierarchy.

Every error carries a human-readable ``detail`` and the process exit code the
command surface reports for it.
"""


class SLPNetError(Exception):
    """Base class for all reported errors."""

    exit_code = 1

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


# Usage
class UsageError(SLPNetError):
    exit_code = 2


class UnknownFlagError(UsageError):
    exit_code = 3


class MissingFlagError(UsageError):
    exit_code = 4


class UnreadablePathError(SLPNetError):
    exit_code = 5


# Data
class DataError(SLPNetError):
    exit_code = 6


class MissingFileError(DataError):
    pass


class DecodeError(DataError):
    pass


class EmptySplitError(DataError):
    pass


class NonSquareError(DataError):
    pass


# Checkpoints
class CheckpointError(SLPNetError):
    exit_code = 7


# Training
class NonFiniteLossError(SLPNetError):
    exit_code = 8


class MissingGradientError(SLPNetError):
    exit_code = 10


# Settings
class ConfigError(SLPNetError):
    exit_code = 9


# Shapes and model wiring
class ShapeError(SLPNetError):
    exit_code = 10


class ShapeMismatchError(ShapeError):
    pass


class EmptyOutputError(ShapeError):
    pass


class GroupDivisibilityError(ShapeError):
    pass


class OddSpatialError(ShapeError):
    pass


class UnsupportedScaleError(ShapeError):
    pass


class NonBinaryTargetError(ShapeError):
    pass


class IndivisibleSizeError(ShapeError):
    pass


class InvalidConfigError(ShapeError):
    pass
