"""Pydantic models for contrastive training."""

from enum import Enum

from pydantic import BaseModel, Field, field_validator, model_validator

from src.models.chunk import check_finite


class ModelVariant(str, Enum):
    """Residual structure of the next-query update.

    FULL is the production model; the others are architecture ablations.
    """

    FULL = "full"
    WITHOUT_CHUNK = "without_chunk"
    WITHOUT_QUERY = "without_query"
    WITHOUT_GATE = "without_gate"


class TrainExample(BaseModel):
    """One (query, context chunk) -> next-hop chunk supervision pair."""

    query_emb: list[float] = Field(..., min_length=1)
    context_emb: list[float] = Field(..., min_length=1)
    positive_id: str
    negative_ids: list[str] = Field(default_factory=list)
    context_id: str | None = Field(
        default=None, description="Gold chunk the hop conditions on, when known"
    )

    @field_validator("query_emb", "context_emb")
    @classmethod
    def embeddings_finite(cls, v: list[float]) -> list[float]:
        return check_finite(v)

    @model_validator(mode="after")
    def positive_not_negative(self) -> "TrainExample":
        if self.positive_id in self.negative_ids:
            raise ValueError(
                f"positive_id {self.positive_id!r} also listed as a negative"
            )
        if len(self.query_emb) != len(self.context_emb):
            raise ValueError("query_emb and context_emb dimensions differ")
        return self


class TrainConfig(BaseModel):
    """Training hyperparameters (defaults follow the published recipe)."""

    temperature: float = Field(default=0.15, gt=0)
    num_negatives: int = Field(default=5, ge=1)
    batch_size: int = Field(default=64, ge=1)
    learning_rate: float = Field(default=6e-5, ge=0)
    beta1: float = Field(default=0.9, ge=0, lt=1)
    beta2: float = Field(default=0.999, ge=0, lt=1)
    eps: float = Field(default=1e-8, gt=0)
    weight_decay: float = Field(default=0.01, ge=0)
    epochs: int = Field(default=20, ge=0)
    seed: int = 42
    dropout_rate: float = Field(default=0.1, ge=0, lt=1)
    variant: ModelVariant = ModelVariant.FULL
    init_scheme: str = Field(default="glorot", pattern="^(glorot|zero)$")


class TrainReport(BaseModel):
    """Outcome of a training run."""

    epoch_losses: list[float] = Field(default_factory=list)
    steps: int = 0
    example_count: int = 0
    wall_clock_seconds: float = Field(default=0.0, ge=0)
    config: TrainConfig
    checkpoint_path: str | None = None
