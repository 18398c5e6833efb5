"""Typed errors raised by bundle IO, the pipeline stages, and the CLI."""

from __future__ import annotations


class OpenLabelError(Exception):
    """Base class for every error this package raises on purpose."""


class ValidationError(OpenLabelError):
    """A config, manifest, or in-memory structure violates an invariant."""


class BundleError(ValidationError):
    """A dataset bundle on disk is malformed."""


class MissingFile(BundleError):
    """A file the manifest promises does not exist."""


class MagicMismatch(BundleError):
    """A binary matrix file does not start with the expected magic bytes."""


class VersionMismatch(BundleError):
    """A manifest or matrix file declares an unsupported format version."""


class ShapeMismatch(BundleError):
    """A matrix's declared shape disagrees with its payload or the manifest."""


class NonFiniteValue(BundleError):
    """An embedding matrix contains a NaN or infinity."""


class DanglingIndex(BundleError):
    """An index reference points outside the matrix or vocabulary it names."""


class DuplicateId(BundleError):
    """Two records claim the same identifier or embedding row."""


class IoError(OpenLabelError):
    """An operating-system level read or write failed."""


class DegenerateVector(OpenLabelError):
    """A vector with near-zero norm was handed to a direction-only operation."""


class RejectionExceeded(OpenLabelError):
    """Prototype sampling could not satisfy the separation constraint."""


class TooFewPoints(ValidationError):
    """Fewer points than requested clusters."""


class DimensionMismatch(ValidationError):
    """Input dimensionality disagrees with a fitted model."""


class EmptyDocument(OpenLabelError):
    """An attribute document holds no counts, so no profile can be built."""


class EmptyProfile(OpenLabelError):
    """An attribute profile is empty where a nonempty one is required."""


class GroundTruthUnavailable(ValidationError):
    """An oracle operation was requested without ground truth on hand."""


class InvalidPercent(ValidationError):
    """A percentage parameter lies outside its legal range."""


class NonFiniteLoss(OpenLabelError):
    """Training produced a non-finite loss or gradient."""

    def __init__(self, message: str, epoch: int):
        super().__init__(message)
        self.epoch = epoch


class EmptyEvaluation(ValidationError):
    """Metrics were requested over an empty prediction set."""


class MissingGroundTruth(ValidationError):
    """A prediction refers to a video with no ground-truth label."""
