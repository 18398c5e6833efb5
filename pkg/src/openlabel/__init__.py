"""Open-set label discovery over precomputed embedding bundles.

Targets with no source label are clustered, each cluster is named from
its most distinctive attributes, names that rediscover a known class are
pruned, and the survivors extend the label set used for zero-shot
rejection.  A linear adapter is trained on the resulting pseudo-labels.
"""

from .adapter import (
    LinearAdapter,
    TrainConfig,
    adapt,
    contrastive_grad,
    contrastive_loss,
    identity_params,
)
from .bundle import (
    DatasetBundle,
    LabelEntry,
    VideoRecord,
    l2_normalize,
    load_bundle,
    normalize_rows,
    read_matrix,
    save_bundle,
    validate_bundle,
    write_matrix,
)
from .cluster import KMeans
from .discovery import (
    AttributeDocument,
    AttributeProfile,
    CandidateLabel,
    build_documents,
    discover_candidates,
    filter_profile,
    source_profiles,
    tfidf_scores,
    video_attributes,
)
from .errors import (
    BundleError,
    OpenLabelError,
    ValidationError,
)
from .matching import (
    PrunedCandidate,
    SimilarityMatrix,
    attribute_sim,
    build_similarity_matrix,
    match_and_prune,
    position_weights,
)
from .metrics import OpenSetMetrics, evaluate, format_table, ground_truth_map, hos
from .pipeline import (
    STRATEGIES,
    PipelineConfig,
    PipelineResult,
    compare_strategies,
    run_pipeline,
)
from .pseudolabel import select_pseudo_labels
from .rng import SplitMix64
from .synth import GroundTruth, SynthConfig, generate
from .zeroshot import (
    ExtendedLabelSet,
    Prediction,
    baseline_instance_extension_predict,
    baseline_threshold_predict,
    build_extended_label_set,
    compose_label_embedding,
    cosine,
    oracle_extend,
    predict_batch,
    predict_video,
    softmax_scores,
)

__version__ = "0.1.0"

__all__ = [
    "AttributeDocument",
    "AttributeProfile",
    "BundleError",
    "CandidateLabel",
    "DatasetBundle",
    "ExtendedLabelSet",
    "GroundTruth",
    "KMeans",
    "LabelEntry",
    "LinearAdapter",
    "OpenLabelError",
    "OpenSetMetrics",
    "PipelineConfig",
    "PipelineResult",
    "Prediction",
    "PrunedCandidate",
    "STRATEGIES",
    "SimilarityMatrix",
    "SplitMix64",
    "SynthConfig",
    "TrainConfig",
    "ValidationError",
    "VideoRecord",
    "adapt",
    "attribute_sim",
    "baseline_instance_extension_predict",
    "baseline_threshold_predict",
    "build_documents",
    "build_extended_label_set",
    "build_similarity_matrix",
    "compare_strategies",
    "compose_label_embedding",
    "contrastive_grad",
    "contrastive_loss",
    "cosine",
    "discover_candidates",
    "evaluate",
    "filter_profile",
    "format_table",
    "generate",
    "ground_truth_map",
    "hos",
    "identity_params",
    "l2_normalize",
    "load_bundle",
    "match_and_prune",
    "normalize_rows",
    "oracle_extend",
    "position_weights",
    "predict_batch",
    "predict_video",
    "read_matrix",
    "run_pipeline",
    "save_bundle",
    "select_pseudo_labels",
    "softmax_scores",
    "source_profiles",
    "tfidf_scores",
    "validate_bundle",
    "video_attributes",
    "write_matrix",
]
