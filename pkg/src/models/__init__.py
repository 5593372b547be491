"""Pydantic domain models."""

from src.models.chunk import ChunkMetadata, ChunkRecord, ScoredHit
from src.models.controller import (
    AdmittedChunk,
    ControllerConfig,
    HopTimings,
    HopTrace,
    LayerRecord,
    QueryBranch,
)
from src.models.dataset import (
    CurationReport,
    DecompositionRecord,
    EvalQuery,
    Hop,
    QuestionType,
    SynthConfig,
)
from src.models.evaluation import (
    BenchmarkEntry,
    ComparisonReport,
    ComparisonRow,
    EvalReport,
    EvalRow,
    StoreFingerprint,
)
from src.models.manifest import RunManifest
from src.models.training import (
    ModelVariant,
    TrainConfig,
    TrainExample,
    TrainReport,
)

__all__ = [
    "AdmittedChunk",
    "BenchmarkEntry",
    "ChunkMetadata",
    "ChunkRecord",
    "ComparisonReport",
    "ComparisonRow",
    "ControllerConfig",
    "CurationReport",
    "DecompositionRecord",
    "EvalQuery",
    "EvalReport",
    "EvalRow",
    "Hop",
    "HopTimings",
    "HopTrace",
    "LayerRecord",
    "ModelVariant",
    "QueryBranch",
    "QuestionType",
    "RunManifest",
    "ScoredHit",
    "StoreFingerprint",
    "SynthConfig",
    "TrainConfig",
    "TrainExample",
    "TrainReport",
]
