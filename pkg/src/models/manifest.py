"""Run manifest written next to every CLI output."""

from pydantic import BaseModel, Field


class RunManifest(BaseModel):
    """What a CLI run consumed and produced."""

    subcommand: str
    tool_version: str
    seed: int | None = None
    config_path: str | None = None
    inputs: dict[str, str] = Field(default_factory=dict)
    outputs: dict[str, str] = Field(default_factory=dict)
    input_hashes: dict[str, str] = Field(default_factory=dict)
    effective_config: dict = Field(default_factory=dict)
    config_hash: str = Field(
        default="", description="sha256 of effective_config (key order independent)"
    )
    embedding_model: str | None = Field(
        default=None, description="External model that produced input embeddings"
    )
