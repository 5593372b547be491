"""Negative sampling for contrastive pairs."""

from collections.abc import Collection

import numpy as np

from src.exceptions import DataError
from src.store.vector_store import VectorStore


def sample_negatives(
    store: VectorStore,
    exclude: Collection[str],
    count: int,
    rng: np.random.Generator,
) -> list[str]:
    """Draw distinct chunk ids uniformly without replacement.

    Candidates are store ids in insertion order minus the excluded ids
    (positive and context chunk), so the draw is reproducible from rng state.

    Raises:
        DataError: If fewer than count candidates remain
    """
    excluded = set(exclude)
    pool = [chunk_id for chunk_id in store.ids if chunk_id not in excluded]
    if len(pool) < count:
        raise DataError(
            f"Need {count} negatives but only {len(pool)} candidate chunks remain"
        )
    if count == 0:
        return []
    picks = rng.choice(len(pool), size=count, replace=False)
    return [pool[int(i)] for i in picks]
