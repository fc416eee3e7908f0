"""Cognitive-hardness scoring and selection for instruction-tuning data.

Records are scored on reward, Bloom-level weight, interdisciplinary
complexity, instruction-response expansion, and silhouette isolation,
then filtered through a three-stage keep-top pipeline. All model-backed
judgments sit behind pluggable, cacheable backends; a deterministic
offline stub runs the whole pipeline with no network.
"""

__version__ = "0.1.0"

from .backends import BackendConfig, HttpBackend, ModelBackend, ResponseCache, StubBackend
from .cluster import (
    KERNEL_BACKEND,
    ClusterModel,
    SilhouetteResult,
    TfidfModel,
    auto_k,
    fit_tfidf,
    kmeans,
    silhouette,
)
from .errors import (
    BackendError,
    ConfigError,
    DatasetFormatError,
    PipelineError,
    ThtbError,
)
from .metrics import (
    CognitiveLevel,
    LengthMeasure,
    LengthUnit,
    NormalizationContext,
    ScoreCard,
    aggregate_extrinsic,
    aggregate_intrinsic,
    bloom_normalize,
    bloom_raw,
    cosine_distance,
    interdisciplinary_complexity,
    irei,
    measure_lengths,
    minmax_normalize,
)
from .pipeline import (
    DisciplineCatalog,
    PipelineConfig,
    PipelineResult,
    RunManifest,
    StageReport,
    build_backend,
    run_pipeline,
    score_dataset,
    stage1_reward_filter,
    stage2_intrinsic_filter,
    stage3_extrinsic_filter,
    thtb_dataset_score,
    thtb_record_scores,
)
from .records import Dataset, InstructionRecord, load_dataset, load_scored, write_dataset, write_scored

__all__ = [
    "BackendConfig",
    "BackendError",
    "ClusterModel",
    "CognitiveLevel",
    "ConfigError",
    "Dataset",
    "DatasetFormatError",
    "DisciplineCatalog",
    "HttpBackend",
    "InstructionRecord",
    "KERNEL_BACKEND",
    "LengthMeasure",
    "LengthUnit",
    "ModelBackend",
    "NormalizationContext",
    "PipelineConfig",
    "PipelineError",
    "PipelineResult",
    "ResponseCache",
    "RunManifest",
    "ScoreCard",
    "SilhouetteResult",
    "StageReport",
    "StubBackend",
    "TfidfModel",
    "ThtbError",
    "aggregate_extrinsic",
    "aggregate_intrinsic",
    "auto_k",
    "bloom_normalize",
    "bloom_raw",
    "build_backend",
    "cosine_distance",
    "fit_tfidf",
    "interdisciplinary_complexity",
    "irei",
    "kmeans",
    "load_dataset",
    "load_scored",
    "measure_lengths",
    "minmax_normalize",
    "run_pipeline",
    "score_dataset",
    "silhouette",
    "stage1_reward_filter",
    "stage2_intrinsic_filter",
    "stage3_extrinsic_filter",
    "thtb_dataset_score",
    "thtb_record_scores",
    "write_dataset",
    "write_scored",
    "__version__",
]
