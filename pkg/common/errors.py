# common/errors.py
# -----------------------------------------------------------------------------
# One exception family for the whole package. Callers at the boundaries (CLI,
# HTTP routes) catch EgcnnError; everything below raises the narrowest subclass.
# -----------------------------------------------------------------------------


class EgcnnError(Exception):
    """Base class for every failure raised by this package."""


class ShapeMismatchError(EgcnnError):
    """Grids, kernels or parameters whose dimensions do not line up."""


class ParameterRangeError(EgcnnError):
    """A configuration or call argument outside its documented range."""


class NonFiniteError(EgcnnError):
    """A NaN or Inf appeared where only finite values are allowed."""


class MissingForwardStateError(EgcnnError):
    """A backward pass was requested without the saved forward activations."""


class TapeError(EgcnnError):
    """Misuse of a GradTape (double replay, empty tape)."""


class CheckpointFormatError(EgcnnError):
    """A checkpoint file that is truncated, has bad magic, or mismatched shapes."""


class RasterFormatError(EgcnnError):
    """An image, depth or field file that cannot be decoded."""


class DatasetError(EgcnnError):
    """An empty or inconsistent dataset directory."""


class TrainingDivergedError(EgcnnError):
    """Training produced a non-finite loss or parameter."""


class ConfigError(EgcnnError):
    """Unknown keys or invalid values in a run configuration."""
