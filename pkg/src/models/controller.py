"""Models for the multi-hop retrieval controller and its trace."""

from dataclasses import dataclass, field

import numpy as np
from pydantic import BaseModel, Field

from src.config import settings


class ControllerConfig(BaseModel):
    """Controller settings: top-K per retrieval, hop count and pruning rules."""

    top_k: int = Field(default=settings.DEFAULT_TOP_K, ge=1, description="K")
    hops: int = Field(default=settings.DEFAULT_HOPS, ge=1, description="N")
    redundancy_pruning: bool = True
    layerwise_top_pruning: bool = True
    normalize_next_query: bool = settings.NORMALIZE_NEXT_QUERY

    model_config = {"frozen": True}

    @property
    def label(self) -> str:
        """Short retriever label in the results-table style."""
        base = f"TreeHop@{self.top_k} iter{self.hops}"
        if not self.redundancy_pruning and not self.layerwise_top_pruning:
            return f"{base} w/o pruning"
        if not self.redundancy_pruning:
            return f"{base} w/o redundancy pruning"
        if not self.layerwise_top_pruning:
            return f"{base} w/o layer-wise top pruning"
        return base


@dataclass(frozen=True)
class QueryBranch:
    """A live node of the retrieval tree."""

    query_emb: np.ndarray
    depth: int
    parent_chunk_id: str | None = None
    path: tuple[str, ...] = field(default_factory=tuple)


class AdmittedChunk(BaseModel):
    """A candidate that passed the layer threshold."""

    id: str
    score: float
    parent: str | None = Field(
        default=None, description="Chunk that spawned the branch (None at layer 1)"
    )


class LayerRecord(BaseModel):
    """Statistics for one retrieval layer."""

    layer: int = Field(..., ge=1)
    branches: int = Field(..., ge=0, description="Query branches entering the layer")
    candidates: int = Field(..., ge=0, description="Hits before any pruning")
    redundancy_pruned: int = Field(default=0, ge=0)
    threshold: float | None = Field(
        default=None, description="K-th best score t (None when top pruning is off)"
    )
    admitted: list[AdmittedChunk] = Field(default_factory=list)
    added: list[str] = Field(
        default_factory=list, description="Chunks newly added to the retrieved set"
    )
    tie_surplus: int = Field(
        default=0, ge=0, description="Admissions beyond K caused by ties at t"
    )
    surviving_branches: int = Field(
        default=0, ge=0, description="Next-query branches spawned for the next layer"
    )


class HopTimings(BaseModel):
    """Wall-clock split of one controller run (never serialized with the trace)."""

    retrieval_seconds: float = 0.0
    forward_seconds: float = 0.0


class HopTrace(BaseModel):
    """Full record of a multi-hop retrieval."""

    config: ControllerConfig
    layers: list[LayerRecord] = Field(default_factory=list)
    retrieved: list[str] = Field(default_factory=list)
    early_terminated: bool = False
    forward_count: int = 0
    timings: HopTimings = Field(default_factory=HopTimings, exclude=True)
