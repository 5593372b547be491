"""Training example files (JSONL, one TrainExample per line)."""

import logging
from pathlib import Path

import numpy as np

from src.exceptions import UnknownChunkError
from src.models.training import TrainExample
from src.store.vector_store import VectorStore
from src.training.negatives import sample_negatives
from src.utils.jsonl import iter_jsonl, write_jsonl

logger = logging.getLogger(__name__)


def resolve_example(
    example: TrainExample,
    store: VectorStore,
    num_negatives: int,
    rng: np.random.Generator,
) -> TrainExample:
    """Check ids against the store and sample negatives if none were given.

    Raises:
        UnknownChunkError: If the positive, context or a negative id is unknown
        DataError: If the store is too small to sample negatives
    """
    for chunk_id in (example.positive_id, example.context_id, *example.negative_ids):
        if chunk_id is not None and chunk_id not in store:
            raise UnknownChunkError(chunk_id)
    if "negative_ids" in example.model_fields_set:
        return example
    exclude = {example.positive_id}
    if example.context_id is not None:
        exclude.add(example.context_id)
    negatives = sample_negatives(store, exclude, num_negatives, rng)
    return example.model_copy(update={"negative_ids": negatives})


def load_train_examples(
    path: str | Path,
    store: VectorStore,
    num_negatives: int,
    seed: int,
) -> list[TrainExample]:
    """Read a training file, sampling omitted negatives under the run seed.

    Lines are processed in file order from a single generator seeded with
    seed, so the sampled negatives are reproducible.
    """
    rng = np.random.default_rng(seed)
    examples = [
        resolve_example(example, store, num_negatives, rng)
        for example in iter_jsonl(path, TrainExample)
    ]
    logger.info(f"Loaded {len(examples)} training examples from {path}")
    return examples


def save_train_examples(path: str | Path, examples: list[TrainExample]) -> int:
    """Write examples as JSONL; returns the number written."""
    return write_jsonl(path, examples)
