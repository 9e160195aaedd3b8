"""Exception hierarchy shared by the library and the CLI."""


class WatermarkError(Exception):
    """Base class for every error raised by roniwm."""


class ParameterError(WatermarkError, ValueError):
    """Invalid caller-supplied parameters (geometry, depth, key material)."""


class GeometryError(ParameterError):
    pass


class KeyRejectedError(ParameterError):
    """Embedding key does not give a bijection over the slot count."""


class CapacityError(ParameterError):
    pass


class EmptyRegionError(CapacityError):
    pass


class RoniNotCleanError(ParameterError):
    """The region outside the ROI is not in the canonical pre-embedding state."""


class SlotMismatchError(ParameterError):
    pass


class FormatError(WatermarkError):
    """Malformed container bytes."""


class UnsupportedFormatError(FormatError):
    """Well-formed container that uses a feature outside the supported subset."""


class ManifestError(WatermarkError):
    pass
