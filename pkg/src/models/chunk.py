"""Pydantic models for store records and retrieval hits."""

import math

from pydantic import BaseModel, Field, field_validator


def check_finite(values: list[float]) -> list[float]:
    """Reject embeddings with NaN or Inf components.

    Args:
        values: Raw embedding components

    Returns:
        The same list when every component is finite

    Raises:
        ValueError: If any component is NaN or Inf
    """
    for i, v in enumerate(values):
        if not math.isfinite(v):
            raise ValueError(f"embedding component {i} is not finite: {v}")
    return values


class ChunkRecord(BaseModel):
    """One row of the retrieval database (one JSONL ingestion line)."""

    id: str = Field(..., min_length=1, description="Unique chunk identifier")
    title: str | None = Field(default=None, description="Optional document title")
    text: str | None = Field(default=None, description="Optional chunk text")
    embedding: list[float] = Field(..., min_length=1)

    @field_validator("embedding")
    @classmethod
    def embedding_finite(cls, v: list[float]) -> list[float]:
        return check_finite(v)


class ChunkMetadata(BaseModel):
    """Sidecar metadata persisted next to a binary store."""

    id: str
    title: str | None = None
    text: str | None = None


class ScoredHit(BaseModel):
    """A retrieved chunk with its exact cosine similarity to the query."""

    chunk_id: str
    score: float = Field(..., ge=-1.0 - 1e-6, le=1.0 + 1e-6)

    model_config = {"frozen": True}
