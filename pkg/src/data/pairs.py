"""Turn curated decomposition records into contrastive training examples."""

import logging

import numpy as np

from src.exceptions import DataError, UnknownChunkError
from src.models.dataset import DecompositionRecord
from src.models.training import TrainConfig, TrainExample
from src.store.vector_store import VectorStore
from src.training.negatives import sample_negatives

logger = logging.getLogger(__name__)


def build_train_examples(
    records: list[DecompositionRecord],
    store: VectorStore,
    config: TrainConfig,
    rng: np.random.Generator,
) -> list[TrainExample]:
    """One example per consecutive hop pair (teacher forcing).

    For hop r of a record with n hops (r = 1 .. n-1): the query is the
    record's question embedding at r = 1 and the gold sub-query embedding at
    hop r otherwise; the context is the stored embedding of the hop-r gold
    chunk; the positive is the hop-(r+1) gold chunk. Negatives are sampled
    from the store, excluding the positive and the context chunk.

    Raises:
        UnknownChunkError: If a gold chunk id is not in the store
        DataError: If a positive equals its context chunk
    """
    examples: list[TrainExample] = []
    for record in records:
        for r in range(1, len(record.hops)):
            context_id = record.hops[r - 1].gold_chunk_id
            positive_id = record.hops[r].gold_chunk_id
            if positive_id not in store:
                raise UnknownChunkError(positive_id)
            if positive_id == context_id:
                raise DataError(
                    f"{record.question_id}: hop {r + 1} repeats chunk {context_id!r}"
                )
            query = record.query_emb if r == 1 else record.hop_context_embs[r - 1]
            negatives = sample_negatives(
                store, {positive_id, context_id}, config.num_negatives, rng
            )
            examples.append(
                TrainExample(
                    query_emb=list(query),
                    context_emb=store.get_embedding(context_id).tolist(),
                    positive_id=positive_id,
                    negative_ids=negatives,
                    context_id=context_id,
                )
            )
    logger.info(f"Built {len(examples)} training examples from {len(records)} records")
    return examples
