"""Pydantic models for evaluation rows and reports."""

from pydantic import BaseModel, Field

from src.models.controller import ControllerConfig


class EvalRow(BaseModel):
    """One results-table row: retriever, Recall@K, average K, latency."""

    label: str
    recall_at_k: float = Field(..., ge=0, le=1)
    hit_rate: float = Field(default=0.0, ge=0, le=1)
    avg_k: float = Field(..., ge=0)
    latency_seconds: float = Field(..., ge=0)
    retrieval_seconds: float = Field(default=0.0, ge=0)
    forward_seconds: float = Field(default=0.0, ge=0)
    query_count: int = Field(..., ge=1)
    top_k: int = Field(..., ge=1)
    hops: int = Field(default=1, ge=1)


class ComparisonRow(BaseModel):
    """An EvalRow with deltas against the baseline row."""

    row: EvalRow
    delta_recall: float
    delta_avg_k: float
    delta_latency: float


class ComparisonReport(BaseModel):
    """Side-by-side comparison of retrievers."""

    baseline: str
    rows: list[ComparisonRow]
    markdown: str = ""


class StoreFingerprint(BaseModel):
    """Identity of the store an evaluation ran against."""

    record_count: int
    dim: int
    digest: str


class EvalReport(BaseModel):
    """CLI-facing evaluation report."""

    rows: list[EvalRow]
    comparison: ComparisonReport | None = None
    config: dict = Field(default_factory=dict)
    store: StoreFingerprint
    version: str


class BenchmarkEntry(BaseModel):
    """One retriever of a benchmark grid.

    Entries with use_model False run the direct top-K baseline
    (config.hops is then ignored).
    """

    config: ControllerConfig
    use_model: bool = True

    @property
    def label(self) -> str:
        if not self.use_model:
            return f"Direct@{self.config.top_k}"
        return self.config.label
