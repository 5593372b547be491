"""Run manifests: what a CLI run read, what it wrote, and with which config."""

import hashlib
import json
import logging
import time
from pathlib import Path
from typing import Any

from src.config import settings
from src.models.evaluation import StoreFingerprint
from src.models.manifest import RunManifest
from src.store.vector_store import VectorStore

logger = logging.getLogger(__name__)

_CHUNK_SIZE = 1 << 20


def generate_input_hash(data: dict[str, Any]) -> str:
    """SHA256 of a JSON-serializable mapping (key order independent)."""
    json_str = json.dumps(data, sort_keys=True, default=str)
    return hashlib.sha256(json_str.encode()).hexdigest()


def hash_file(path: str | Path) -> str:
    """SHA256 of a file's bytes."""
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        while block := f.read(_CHUNK_SIZE):
            digest.update(block)
    return digest.hexdigest()


def fingerprint_store(store: VectorStore) -> StoreFingerprint:
    """Record count, dimension and a digest over ids and stored float32 values."""
    digest = hashlib.sha256()
    for chunk_id in store.ids:
        digest.update(chunk_id.encode("utf-8"))
        digest.update(b"\0")
    digest.update(store.float32_rows().astype("<f4").tobytes())
    return StoreFingerprint(
        record_count=len(store), dim=store.dim, digest=digest.hexdigest()
    )


def manifest_path(output: str | Path) -> Path:
    """Manifest location for a primary output file or directory."""
    output = Path(output)
    if output.is_dir():
        return output / "manifest.json"
    return output.with_name(output.name + ".manifest.json")


class RunRecorder:
    """Collects inputs and outputs of one CLI run and writes its manifest.

    Example:
        >>> recorder = RunRecorder("train", seed=42)
        >>> recorder.add_input("examples", "pairs.jsonl")
        >>> recorder.add_output("model", "model.bin")
        >>> recorder.complete()
    """

    def __init__(
        self,
        subcommand: str,
        seed: int | None = None,
        config_path: str | None = None,
        effective_config: dict[str, Any] | None = None,
        embedding_model: str | None = None,
    ) -> None:
        self.manifest = RunManifest(
            subcommand=subcommand,
            tool_version=settings.APP_VERSION,
            seed=seed,
            config_path=config_path,
            effective_config=effective_config or {},
            config_hash=generate_input_hash(effective_config or {}),
            embedding_model=embedding_model,
        )
        self._started = time.perf_counter()

    def add_input(self, name: str, path: str | Path) -> None:
        """Register an input file; its sha256 goes into the manifest."""
        self.manifest.inputs[name] = str(path)
        if Path(path).is_file():
            self.manifest.input_hashes[name] = hash_file(path)

    def add_output(self, name: str, path: str | Path) -> None:
        self.manifest.outputs[name] = str(path)

    def complete(self, manifest_file: str | Path | None = None) -> Path | None:
        """Write the manifest next to the first output.

        Args:
            manifest_file: Explicit location (default: derived from the first
                registered output)

        Returns:
            Path written, or None when the run produced no output files
        """
        if manifest_file is None:
            if not self.manifest.outputs:
                logger.debug(f"{self.manifest.subcommand}: no outputs, no manifest")
                return None
            manifest_file = manifest_path(next(iter(self.manifest.outputs.values())))
        target = Path(manifest_file)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(
            self.manifest.model_dump_json(indent=2) + "\n", encoding="utf-8"
        )

        elapsed = time.perf_counter() - self._started
        logger.info(
            f"Completed {self.manifest.subcommand} in {elapsed:.2f}s "
            f"(manifest: {target})"
        )
        return target
