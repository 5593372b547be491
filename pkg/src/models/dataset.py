"""Pydantic models for decomposition records, synthetic corpora and eval queries."""

from enum import Enum

from pydantic import BaseModel, Field, field_validator, model_validator

from src.models.chunk import check_finite


class QuestionType(str, Enum):
    """Multi-hop question categories of the decomposition datasets."""

    INFERENCE = "inference"
    COMPOSITIONAL = "compositional"
    BRIDGE_COMPARISON = "bridge_comparison"
    COMPARISON = "comparison"
    OTHER = "other"


class Hop(BaseModel):
    """One decomposition step: sub-question text and its evidence chunk."""

    sub_query: str
    gold_chunk_id: str


class DecompositionRecord(BaseModel):
    """A multi-hop question with its gold decomposition.

    ``hop_context_embs[r]`` is the embedding of the sub-query at hop r + 1,
    aligned with ``hops``. Hop counts are checked by curation, not here, so
    malformed records can be counted instead of rejected.
    """

    question_id: str
    question_type: QuestionType
    hops: list[Hop] = Field(default_factory=list)
    query_emb: list[float] = Field(..., min_length=1)
    hop_context_embs: list[list[float]] = Field(default_factory=list)

    @field_validator("query_emb")
    @classmethod
    def query_finite(cls, v: list[float]) -> list[float]:
        return check_finite(v)

    @field_validator("hop_context_embs")
    @classmethod
    def hops_finite(cls, v: list[list[float]]) -> list[list[float]]:
        for emb in v:
            check_finite(emb)
        return v


class EvalQuery(BaseModel):
    """An evaluation question with its gold evidence chunks."""

    question_id: str
    query_emb: list[float] = Field(..., min_length=1)
    gold_ids: list[str] = Field(..., min_length=1)

    @field_validator("query_emb")
    @classmethod
    def query_finite(cls, v: list[float]) -> list[float]:
        return check_finite(v)


class SynthConfig(BaseModel):
    """Synthetic compositional corpus parameters."""

    d: int = Field(default=64, ge=1)
    num_entities: int = Field(default=1500, ge=1)
    num_relations: int = Field(default=50, ge=1)
    num_chains: int = Field(default=500, ge=1)
    chain_length: int = Field(default=2, ge=1, description="Hops per chain")
    num_distractors: int = Field(default=0, ge=0)
    noise_sigma: float = Field(default=0.0, ge=0)
    seed: int = 42

    @model_validator(mode="after")
    def enough_entities(self) -> "SynthConfig":
        needed = (self.chain_length + 1) * self.num_chains
        if self.num_entities < needed:
            raise ValueError(
                f"num_entities={self.num_entities} too small: chains need {needed} "
                f"distinct entities ({self.chain_length + 1} per chain)"
            )
        return self


class CurationReport(BaseModel):
    """Counts produced by dataset curation."""

    input_count: int = 0
    kept_count: int = 0
    hop_pair_count: int = Field(
        default=0, description="Training pairs the kept records will yield"
    )
    dropped: dict[str, int] = Field(
        default_factory=lambda: {"type": 0, "integrity": 0, "unresolvable": 0}
    )
