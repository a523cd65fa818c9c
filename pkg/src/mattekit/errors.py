"""Exception types shared across the toolkit."""


class MatteKitError(Exception):
    """Base class for all toolkit errors."""


class ShapeMismatchError(MatteKitError, ValueError):
    """Arrays or feature maps do not have the dimensions an operation requires."""


class RangeError(MatteKitError, ValueError):
    """Values fall outside their documented domain (e.g. alpha outside [0,1])."""


class ConfigError(MatteKitError, ValueError):
    """Invalid configuration file, unknown key, or bad override."""


class AssetError(MatteKitError, IOError):
    """An input asset is missing or cannot be decoded."""


class CheckpointError(MatteKitError, IOError):
    """A checkpoint file is missing, corrupt, or incompatible."""


class TrainingDiverged(MatteKitError, RuntimeError):
    """The training loss became non-finite; diagnostics are attached."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
