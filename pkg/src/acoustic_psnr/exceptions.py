"""
Error hierarchy for acoustic-psnr
Every library error carries the process exit code the CLI reports for it
"""

from typing import Optional


class PsnrError(Exception):
    """Base class for all acoustic-psnr errors"""

    exit_code: int = 1

    def __init__(self, message: str, *, detail: Optional[dict] = None):
        super().__init__(message)
        self.detail = detail or {}


class UsageError(PsnrError):
    """Invalid arguments or preconditions supplied by the caller"""

    exit_code = 2


class DataError(PsnrError):
    """Input data that cannot be processed (audio, manifests, weight files)"""

    exit_code = 3


class NumericalError(PsnrError):
    """Numerical failure: divergence, non-identifiable fit, failed refits"""

    exit_code = 4


# dsp
class EmptyClipError(DataError):
    pass


class SilentClipError(DataError):
    pass


class ClipTooShortError(DataError):
    pass


class UnsupportedResampleError(UsageError):
    pass


class BandError(UsageError):
    pass


# mixing / corpus
class DurationMismatchError(DataError):
    pass


class EmptyClipSetError(DataError):
    pass


class InvalidSpecError(UsageError):
    pass


# detector
class WeightFileError(DataError):
    pass


class ShapeMismatchError(WeightFileError):
    def __init__(self, layer: str, expected: tuple, found: tuple):
        super().__init__(
            f"Shape mismatch for layer '{layer}': expected {expected}, found {found}",
            detail={"layer": layer, "expected": list(expected), "found": list(found)},
        )
        self.layer = layer


class SingleClassDatasetError(DataError):
    pass


class TrainingDivergedError(NumericalError):
    pass


class DetectorFailureError(DataError):
    pass


# psychometric
class CurveNotIdentifiableError(NumericalError):
    pass


class LevelNotReachedError(NumericalError):
    def __init__(self, level: float):
        super().__init__(f"Detection rate never crosses p = {level}", detail={"level": level})
        self.level = level


class BootstrapError(NumericalError):
    pass
