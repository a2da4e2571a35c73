"""Exception hierarchy for fusionseg.

Library code raises these; only the CLI turns them into exit codes
(validation errors exit 1, runtime errors exit 2).
"""


class FusionSegError(Exception):
    """Base exception for all fusionseg errors"""
    pass


class FusionSegValidationError(FusionSegError):
    """Invalid input file, configuration or data layout"""
    pass


class FusionSegRuntimeError(FusionSegError):
    """Failure while computing on otherwise valid inputs"""
    pass


# --- file formats ---------------------------------------------------------

class BadMagic(FusionSegValidationError):
    """NIfTI magic string missing or wrong"""
    pass


class UnsupportedDatatype(FusionSegValidationError):
    """NIfTI datatype code outside the supported set"""
    pass


class UnsupportedDim(FusionSegValidationError):
    """NIfTI volume is not three-dimensional"""
    pass


class UnsupportedOrientation(FusionSegValidationError):
    """Oblique or rotated sform; only axis-aligned grids are supported"""
    pass


class MissingFile(FusionSegValidationError):
    """A referenced file does not exist"""

    def __init__(self, path: object, what: str = "file") -> None:
        self.path = path
        super().__init__(f"{what} not found: {path}")


class SchemaError(FusionSegValidationError):
    """Manifest or study content violates the documented schema"""
    pass


class GridMismatch(FusionSegValidationError):
    """Volumes that must share a grid do not"""
    pass


class InvalidConfig(FusionSegValidationError):
    """Configuration values are inconsistent"""
    pass


class VersionMismatch(FusionSegValidationError):
    """Checkpoint written by an unsupported format version"""
    pass


class ShapeMismatch(FusionSegValidationError):
    """Tensor or parameter shapes are inconsistent"""
    pass


class OutputExists(FusionSegValidationError):
    """Output directory is not empty and --force was not given"""
    pass


class NotAPhantom(FusionSegValidationError):
    """Study carries no synthesis ground truth"""
    pass


class EmptyCohort(FusionSegValidationError):
    """No cases to aggregate"""
    pass


class EmptyGland(FusionSegValidationError):
    """Gland mask has too few voxels"""
    pass


class EmptyVolume(FusionSegValidationError):
    """Volume has no voxels to sample from"""
    pass


class IoError(FusionSegRuntimeError):
    """File could not be read or written"""
    pass


# --- numerics -------------------------------------------------------------

class DegenerateAxis(FusionSegRuntimeError):
    """Axis too short for the requested interpolation"""
    pass


class DegenerateStd(FusionSegRuntimeError):
    """Near-constant intensities inside the gland"""
    pass


class DegenerateVariance(FusionSegRuntimeError):
    """Similarity metric undefined for constant inputs"""
    pass


class NoOverlap(FusionSegRuntimeError):
    """Moving and fixed volumes barely overlap"""
    pass


class SingularTransform(FusionSegRuntimeError):
    """Affine transform has a (near) singular linear part"""
    pass


class NonFiniteLoss(FusionSegRuntimeError):
    """Training loss became NaN or infinite"""

    def __init__(self, step: int, value: float) -> None:
        self.step = step
        self.value = value
        super().__init__(f"Non-finite loss {value} at step {step}")


class NonPositiveVolume(FusionSegRuntimeError):
    """Lesion volume must be positive"""
    pass


class DegenerateClasses(FusionSegRuntimeError):
    """Curve metrics need both positive and negative units"""
    pass


class TooFewSamples(FusionSegRuntimeError):
    """Statistical test needs at least two samples per group"""
    pass
