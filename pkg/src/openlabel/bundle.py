"""Dataset bundle types and on-disk IO.

A bundle is a directory holding ``manifest.json`` plus three binary matrix
files: ``video_embeddings.bin``, ``label_embeddings.bin`` and
``attribute_embeddings.bin``.  Matrix files use a fixed little-endian layout:

    bytes 0..4   magic "ALEB"
    u32          format version (1)
    u32          rows
    u32          cols
    rows*cols    float32 values, row-major, no padding, no trailer

Embeddings are stored as float32 and promoted to float64 only inside loss
and gradient arithmetic.  Loaded arrays are marked read-only; a bundle is
immutable after load.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    BundleError,
    DanglingIndex,
    DegenerateVector,
    DuplicateId,
    IoError,
    MagicMismatch,
    MissingFile,
    NonFiniteValue,
    ShapeMismatch,
    ValidationError,
    VersionMismatch,
)

MAGIC = b"ALEB"
FORMAT_VERSION = 1
MANIFEST_NAME = "manifest.json"
VIDEO_MATRIX = "video_embeddings.bin"
LABEL_MATRIX = "label_embeddings.bin"
ATTRIBUTE_MATRIX = "attribute_embeddings.bin"

SOURCE = "source"
TARGET = "target"

_HEADER = struct.Struct("<4sIII")


def l2_normalize(v: np.ndarray) -> np.ndarray:
    """Scale a vector to unit length, preserving dtype and direction.

    Raises DegenerateVector when the norm is at or below 1e-12.
    """
    norm = float(np.linalg.norm(np.asarray(v, dtype=np.float64)))
    if norm <= 1e-12:
        raise DegenerateVector(f"cannot normalize vector with norm {norm!r}")
    out = (np.asarray(v, dtype=np.float64) / norm).astype(v.dtype, copy=False)
    return out


def normalize_rows(matrix: np.ndarray) -> np.ndarray:
    """Row-wise l2_normalize of a 2-D float64 array."""
    m = np.asarray(matrix, dtype=np.float64)
    norms = np.linalg.norm(m, axis=1)
    if np.any(norms <= 1e-12):
        bad = int(np.argmax(norms <= 1e-12))
        raise DegenerateVector(f"row {bad} has norm {norms[bad]!r}")
    return m / norms[:, None]


def write_matrix(path: Path, matrix: np.ndarray) -> None:
    """Write a 2-D array as a version-1 binary matrix file."""
    m = np.ascontiguousarray(matrix, dtype="<f4")
    if m.ndim != 2:
        raise ValidationError(f"matrix for {path} must be 2-D, got {m.ndim}-D")
    header = _HEADER.pack(MAGIC, FORMAT_VERSION, m.shape[0], m.shape[1])
    try:
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(m.tobytes())
    except OSError as exc:
        raise IoError(f"failed to write {path}: {exc}") from exc


def read_matrix(path: Path) -> np.ndarray:
    """Read a binary matrix file, returning a read-only float32 array."""
    path = Path(path)
    if not path.is_file():
        raise MissingFile(f"matrix file not found: {path}")
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise IoError(f"failed to read {path}: {exc}") from exc
    if len(raw) < _HEADER.size:
        raise ShapeMismatch(f"{path}: file shorter than the 16-byte header")
    magic, version, rows, cols = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise MagicMismatch(f"{path}: expected magic {MAGIC!r}, found {magic!r}")
    if version != FORMAT_VERSION:
        raise VersionMismatch(f"{path}: unsupported format version {version}")
    expected = _HEADER.size + rows * cols * 4
    if len(raw) != expected:
        raise ShapeMismatch(
            f"{path}: declares {rows}x{cols} ({expected} bytes) but holds {len(raw)}"
        )
    data = np.frombuffer(raw, dtype="<f4", offset=_HEADER.size).reshape(rows, cols)
    out = data.astype(np.float32, copy=True)
    if not np.isfinite(out).all():
        raise NonFiniteValue(f"{path}: matrix contains non-finite values")
    out.flags.writeable = False
    return out


@dataclass(frozen=True, slots=True)
class LabelEntry:
    """A shared (known) class: its display name and embedding row."""

    name: str
    embedding_index: int


@dataclass(frozen=True, slots=True)
class VideoRecord:
    """One video: identity, domain, embedding row, per-frame attributes.

    ``frames`` holds one list per sampled frame, each an ordered list of
    attribute-vocabulary indices, most confident first.  ``true_label`` is
    present for every source record; for target records it is held-out
    evaluation ground truth and must only be read by the metrics stage.
    """

    id: str
    domain: str
    embedding_index: int
    frames: tuple[tuple[int, ...], ...]
    true_label: str | None = None


@dataclass(frozen=True, slots=True)
class DatasetBundle:
    """Immutable in-memory view of a bundle directory."""

    dim: int
    shared_labels: tuple[LabelEntry, ...]
    attribute_vocab: tuple[str, ...]
    videos: tuple[VideoRecord, ...]
    video_embeddings: np.ndarray = field(repr=False)
    label_embeddings: np.ndarray = field(repr=False)
    attribute_embeddings: np.ndarray = field(repr=False)

    @property
    def num_shared(self) -> int:
        return len(self.shared_labels)

    @property
    def shared_names(self) -> tuple[str, ...]:
        return tuple(entry.name for entry in self.shared_labels)

    def source_videos(self) -> tuple[VideoRecord, ...]:
        return tuple(v for v in self.videos if v.domain == SOURCE)

    def target_videos(self) -> tuple[VideoRecord, ...]:
        return tuple(v for v in self.videos if v.domain == TARGET)

    def embedding_of(self, record: VideoRecord) -> np.ndarray:
        return self.video_embeddings[record.embedding_index]

    def shared_label_matrix(self) -> np.ndarray:
        """Shared label embeddings stacked in shared_labels order, float64."""
        rows = [self.label_embeddings[e.embedding_index] for e in self.shared_labels]
        return np.asarray(rows, dtype=np.float64)


def _check_unit_rows(matrix: np.ndarray, what: str, tol: float = 1e-5) -> None:
    norms = np.linalg.norm(matrix.astype(np.float64), axis=1)
    off = np.abs(norms - 1.0)
    if off.size and float(off.max()) > tol:
        bad = int(off.argmax())
        raise ValidationError(
            f"{what} row {bad} has norm {norms[bad]:.6f}, expected unit length"
        )


def _validate_manifest_dict(manifest: dict, where: str) -> None:
    if not isinstance(manifest, dict):
        raise ValidationError(f"{where}: manifest must be a JSON object")
    version = manifest.get("version")
    if version != FORMAT_VERSION:
        raise VersionMismatch(f"{where}: unsupported manifest version {version!r}")
    for key in ("dim", "shared_labels", "attribute_vocab", "videos"):
        if key not in manifest:
            raise ValidationError(f"{where}: manifest missing key {key!r}")


def _parse_videos(raw_videos: list, where: str) -> list[VideoRecord]:
    videos: list[VideoRecord] = []
    for i, rec in enumerate(raw_videos):
        ctx = f"{where}: videos[{i}]"
        if not isinstance(rec, dict):
            raise ValidationError(f"{ctx} must be an object")
        for key in ("id", "domain", "embedding_index", "frames"):
            if key not in rec:
                raise ValidationError(f"{ctx} missing key {key!r}")
        if rec["domain"] not in (SOURCE, TARGET):
            raise ValidationError(f"{ctx} has unknown domain {rec['domain']!r}")
        frames = rec["frames"]
        if not isinstance(frames, list) or not frames:
            raise ValidationError(f"{ctx} needs at least one frame")
        parsed_frames = []
        for j, frame in enumerate(frames):
            if not isinstance(frame, list) or not frame:
                raise ValidationError(f"{ctx} frame {j} must be a nonempty list")
            parsed_frames.append(tuple(int(a) for a in frame))
        videos.append(
            VideoRecord(
                id=str(rec["id"]),
                domain=rec["domain"],
                embedding_index=int(rec["embedding_index"]),
                frames=tuple(parsed_frames),
                true_label=rec.get("label"),
            )
        )
    return videos


def validate_bundle(bundle: DatasetBundle, where: str = "bundle") -> None:
    """Check every structural invariant; raises a typed BundleError subclass."""
    if bundle.dim < 1:
        raise ValidationError(f"{where}: dim must be >= 1, got {bundle.dim}")
    if not bundle.shared_labels:
        raise ValidationError(f"{where}: needs at least one shared label")
    if not bundle.videos:
        raise ValidationError(f"{where}: videos list is empty")

    for name, matrix, expected_rows in (
        (VIDEO_MATRIX, bundle.video_embeddings, len(bundle.videos)),
        (LABEL_MATRIX, bundle.label_embeddings, len(bundle.shared_labels)),
        (ATTRIBUTE_MATRIX, bundle.attribute_embeddings, len(bundle.attribute_vocab)),
    ):
        if matrix.ndim != 2 or matrix.shape[1] != bundle.dim:
            raise ShapeMismatch(
                f"{where}: {name} has shape {matrix.shape}, expected (*, {bundle.dim})"
            )
        if matrix.shape[0] != expected_rows:
            raise ShapeMismatch(
                f"{where}: {name} has {matrix.shape[0]} rows, manifest declares {expected_rows}"
            )
        if not np.isfinite(matrix).all():
            raise NonFiniteValue(f"{where}: {name} contains non-finite values")

    _check_unit_rows(bundle.label_embeddings, f"{where}: {LABEL_MATRIX}")
    _check_unit_rows(bundle.attribute_embeddings, f"{where}: {ATTRIBUTE_MATRIX}")

    seen_names: set[str] = set()
    seen_label_rows: set[int] = set()
    for entry in bundle.shared_labels:
        if entry.name in seen_names:
            raise DuplicateId(f"{where}: duplicate shared label name {entry.name!r}")
        seen_names.add(entry.name)
        if not (0 <= entry.embedding_index < bundle.label_embeddings.shape[0]):
            raise DanglingIndex(
                f"{where}: label {entry.name!r} embedding_index {entry.embedding_index} out of range"
            )
        if entry.embedding_index in seen_label_rows:
            raise DuplicateId(
                f"{where}: label {entry.name!r} reuses embedding row {entry.embedding_index}"
            )
        seen_label_rows.add(entry.embedding_index)

    seen_tokens: set[str] = set()
    for idx, token in enumerate(bundle.attribute_vocab):
        if token != token.strip() or token != token.casefold():
            raise ValidationError(
                f"{where}: attribute_vocab[{idx}] {token!r} must be trimmed and case-folded"
            )
        if not token:
            raise ValidationError(f"{where}: attribute_vocab[{idx}] is empty")
        if token in seen_tokens:
            raise DuplicateId(f"{where}: duplicate attribute token {token!r}")
        seen_tokens.add(token)

    shared_names = set(seen_names)
    seen_ids: set[str] = set()
    seen_video_rows: set[int] = set()
    has_source = has_target = False
    for video in bundle.videos:
        ctx = f"{where}: video {video.id!r}"
        if video.id in seen_ids:
            raise DuplicateId(f"{where}: duplicate video id {video.id!r}")
        seen_ids.add(video.id)
        if not (0 <= video.embedding_index < bundle.video_embeddings.shape[0]):
            raise DanglingIndex(
                f"{ctx} embedding_index {video.embedding_index} out of range"
            )
        if video.embedding_index in seen_video_rows:
            raise DuplicateId(f"{ctx} reuses embedding row {video.embedding_index}")
        seen_video_rows.add(video.embedding_index)
        for j, frame in enumerate(video.frames):
            for attr in frame:
                if not (0 <= attr < len(bundle.attribute_vocab)):
                    raise DanglingIndex(
                        f"{ctx} frame {j} attribute index {attr} out of range"
                    )
        if video.domain == SOURCE:
            has_source = True
            if video.true_label is None:
                raise ValidationError(f"{ctx} is a source record without a label")
            if video.true_label not in shared_names:
                raise ValidationError(
                    f"{ctx} labelled {video.true_label!r}, not a shared label"
                )
        else:
            has_target = True
    if not has_source:
        raise ValidationError(f"{where}: bundle has no source videos")
    if not has_target:
        raise ValidationError(f"{where}: bundle has no target videos")


def load_bundle(path: str | Path) -> DatasetBundle:
    """Load and fully validate a bundle directory."""
    root = Path(path)
    manifest_path = root / MANIFEST_NAME
    if not manifest_path.is_file():
        raise MissingFile(f"manifest not found: {manifest_path}")
    try:
        text = manifest_path.read_text()
    except OSError as exc:
        raise IoError(f"failed to read {manifest_path}: {exc}") from exc
    try:
        manifest = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{manifest_path}: invalid JSON: {exc}") from exc
    _validate_manifest_dict(manifest, str(manifest_path))

    shared_labels = []
    for i, entry in enumerate(manifest["shared_labels"]):
        if not isinstance(entry, dict) or "name" not in entry or "embedding_index" not in entry:
            raise ValidationError(
                f"{manifest_path}: shared_labels[{i}] needs name and embedding_index"
            )
        shared_labels.append(
            LabelEntry(name=str(entry["name"]), embedding_index=int(entry["embedding_index"]))
        )
    vocab = tuple(str(t) for t in manifest["attribute_vocab"])
    videos = _parse_videos(manifest["videos"], str(manifest_path))

    bundle = DatasetBundle(
        dim=int(manifest["dim"]),
        shared_labels=tuple(shared_labels),
        attribute_vocab=vocab,
        videos=tuple(videos),
        video_embeddings=read_matrix(root / VIDEO_MATRIX),
        label_embeddings=read_matrix(root / LABEL_MATRIX),
        attribute_embeddings=read_matrix(root / ATTRIBUTE_MATRIX),
    )
    validate_bundle(bundle, where=str(root))
    return bundle


def manifest_dict(bundle: DatasetBundle) -> dict:
    """Manifest JSON object for a bundle, in canonical key order."""
    videos = []
    for v in bundle.videos:
        rec: dict = {
            "id": v.id,
            "domain": v.domain,
            "embedding_index": v.embedding_index,
            "frames": [list(f) for f in v.frames],
        }
        if v.true_label is not None:
            rec["label"] = v.true_label
        videos.append(rec)
    return {
        "version": FORMAT_VERSION,
        "dim": bundle.dim,
        "shared_labels": [
            {"name": e.name, "embedding_index": e.embedding_index}
            for e in bundle.shared_labels
        ],
        "attribute_vocab": list(bundle.attribute_vocab),
        "videos": videos,
    }


def save_bundle(bundle: DatasetBundle, path: str | Path) -> None:
    """Validate and write a bundle directory (manifest plus three matrices)."""
    validate_bundle(bundle, where="bundle to save")
    root = Path(path)
    try:
        root.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoError(f"failed to create {root}: {exc}") from exc
    try:
        with open(root / MANIFEST_NAME, "w") as fh:
            json.dump(manifest_dict(bundle), fh, indent=2)
            fh.write("\n")
    except OSError as exc:
        raise IoError(f"failed to write {root / MANIFEST_NAME}: {exc}") from exc
    write_matrix(root / VIDEO_MATRIX, bundle.video_embeddings)
    write_matrix(root / LABEL_MATRIX, bundle.label_embeddings)
    write_matrix(root / ATTRIBUTE_MATRIX, bundle.attribute_embeddings)


__all__ = [
    "ATTRIBUTE_MATRIX",
    "BundleError",
    "DatasetBundle",
    "FORMAT_VERSION",
    "LABEL_MATRIX",
    "LabelEntry",
    "MAGIC",
    "MANIFEST_NAME",
    "SOURCE",
    "TARGET",
    "VIDEO_MATRIX",
    "VideoRecord",
    "l2_normalize",
    "load_bundle",
    "manifest_dict",
    "normalize_rows",
    "read_matrix",
    "save_bundle",
    "validate_bundle",
    "write_matrix",
]
