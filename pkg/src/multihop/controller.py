"""Layer-by-layer multi-hop retrieval over the vector store.

Each layer retrieves top-K for every live branch, optionally drops chunks
already retrieved (redundancy pruning), keeps candidates scoring at least the
layer's K-th best score (layer-wise top pruning) and turns each kept
(query, chunk) pair into a new branch with next_query.

All branches of a layer share one store search and one batched forward.
"""

import logging
import time

import numpy as np

from src.exceptions import ConfigError, DimensionError, NumericError
from src.model.forward import next_query_batch
from src.model.params import ModelParams
from src.models.controller import (
    AdmittedChunk,
    ControllerConfig,
    HopTrace,
    LayerRecord,
    QueryBranch,
)
from src.store.similarity import as_vector, l2_norm
from src.store.vector_store import VectorStore

logger = logging.getLogger(__name__)


def layer_threshold(scores: list[float], k: int) -> float:
    """K-th best score of a layer (the lowest score when fewer than K)."""
    ranked = sorted(scores, reverse=True)
    return ranked[min(k, len(ranked)) - 1]


def multihop_retrieve(
    store: VectorStore,
    params: ModelParams | None,
    q0: np.ndarray | list[float],
    config: ControllerConfig,
) -> tuple[list[str], HopTrace]:
    """Retrieve chunks over config.hops layers starting from q0.

    Args:
        store: Non-empty vector store
        params: TreeHop parameters (only optional when hops == 1)
        q0: Initial query embedding
        config: K, N and pruning flags

    Returns:
        (retrieved chunk ids ordered by layer, score desc, id asc; trace)

    Raises:
        EmptyStoreError: If the store is empty
        DimensionError: If q0 or params do not match the store dimension
        ZeroNormError: If q0 is all zeros
        ConfigError: If hops > 1 and no params are given
        NumericError: If a generated next query has zero norm
    """
    q0 = as_vector(q0, dim=store.dim)
    l2_norm(q0)
    if config.hops > 1:
        if params is None:
            raise ConfigError("Multi-hop retrieval (hops > 1) requires model params")
        if params.d != store.dim:
            raise DimensionError(
                f"Model dimension {params.d} does not match store dimension "
                f"{store.dim}",
                expected=store.dim,
                got=params.d,
            )

    trace = HopTrace(config=config)
    retrieved: dict[str, None] = {}
    queries = q0[None, :]
    branches = [QueryBranch(query_emb=q0, depth=1)]

    for layer in range(1, config.hops + 1):
        started = time.perf_counter()
        indices, scores = store.search(queries, config.top_k)
        trace.timings.retrieval_seconds += time.perf_counter() - started

        # (score, chunk id, branch, store row)
        candidates: list[tuple[float, str, int, int]] = []
        pruned = 0
        for branch_idx in range(indices.shape[0]):
            for row, score in zip(
                indices[branch_idx].tolist(), scores[branch_idx].tolist(), strict=True
            ):
                chunk_id = store.chunk_id(row)
                if config.redundancy_pruning and chunk_id in retrieved:
                    pruned += 1
                    continue
                candidates.append((score, chunk_id, branch_idx, row))

        record = LayerRecord(
            layer=layer,
            branches=len(branches),
            candidates=indices.size,
            redundancy_pruned=pruned,
        )
        trace.layers.append(record)
        if not candidates:
            trace.early_terminated = True
            logger.warning(
                f"Layer {layer}: every candidate already retrieved, stopping early"
            )
            break

        if config.layerwise_top_pruning:
            threshold = layer_threshold([c[0] for c in candidates], config.top_k)
            admitted = [c for c in candidates if c[0] >= threshold]
            record.threshold = threshold
            record.tie_surplus = max(0, len(admitted) - config.top_k)
        else:
            admitted = candidates
        admitted.sort(key=lambda c: (-c[0], c[1], c[2]))

        for score, chunk_id, branch_idx, _ in admitted:
            record.admitted.append(
                AdmittedChunk.model_construct(
                    id=chunk_id,
                    score=score,
                    parent=branches[branch_idx].parent_chunk_id,
                )
            )
            if chunk_id not in retrieved:
                retrieved[chunk_id] = None
                record.added.append(chunk_id)

        if layer < config.hops:
            started = time.perf_counter()
            queries, branches = _expand(
                store, params, admitted, queries, branches, config
            )
            trace.timings.forward_seconds += time.perf_counter() - started
            record.surviving_branches = len(branches)
        trace.forward_count += record.surviving_branches
        logger.debug(
            f"Layer {layer}: {record.branches} branches, {record.candidates} "
            f"candidates, {pruned} redundant, t={record.threshold}, "
            f"{len(record.admitted)} admitted, {len(record.added)} new"
        )

    trace.retrieved = list(retrieved)
    return trace.retrieved, trace


def _expand(
    store: VectorStore,
    params: ModelParams | None,
    admitted: list[tuple[float, str, int, int]],
    queries: np.ndarray,
    branches: list[QueryBranch],
    config: ControllerConfig,
) -> tuple[np.ndarray, list[QueryBranch]]:
    """One next-query branch per admitted (branch, chunk) pair, in order."""
    assert params is not None
    parent_rows = [c[2] for c in admitted]
    chunk_rows = np.array([c[3] for c in admitted], dtype=np.int64)
    next_queries = next_query_batch(
        params, queries[parent_rows], store.rows_at(chunk_rows)
    )
    norms = np.sqrt(np.einsum("ij,ij->i", next_queries, next_queries))
    if not np.all(np.isfinite(next_queries)):
        raise NumericError("Next query has non-finite components")
    zero = np.flatnonzero(norms == 0.0)
    if zero.size:
        chunk_id = admitted[int(zero[0])][1]
        raise NumericError(f"Next query generated from chunk {chunk_id!r} is zero")
    if config.normalize_next_query:
        next_queries = next_queries / norms[:, None]

    next_branches = []
    for i, (_, chunk_id, branch_idx, _) in enumerate(admitted):
        parent = branches[branch_idx]
        next_branches.append(
            QueryBranch(
                query_emb=next_queries[i],
                depth=parent.depth + 1,
                parent_chunk_id=chunk_id,
                path=(*parent.path, chunk_id),
            )
        )
    return next_queries, next_branches


def direct_retrieve(
    store: VectorStore, q0: np.ndarray | list[float], k: int
) -> list[str]:
    """Single top-K retrieval, the baseline retriever."""
    return [hit.chunk_id for hit in store.top_k(q0, k)]
