"""Run manifests and input fingerprints."""

from src.audit.run_recorder import (
    RunRecorder,
    fingerprint_store,
    generate_input_hash,
    hash_file,
    manifest_path,
)

__all__ = [
    "RunRecorder",
    "fingerprint_store",
    "generate_input_hash",
    "hash_file",
    "manifest_path",
]
