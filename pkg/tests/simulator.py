"""Straight-line re-implementation of layer-wise multi-hop retrieval.

Deliberately naive: every branch scores every chunk with a Python loop and
sorts. Used as the oracle for the controller tests.
"""

from collections.abc import Callable

import numpy as np


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.dot(a, b) / (np.linalg.norm(a) * np.linalg.norm(b)))


def simulate(
    chunks: dict[str, np.ndarray],
    update: Callable[[np.ndarray, np.ndarray], np.ndarray],
    q0: np.ndarray,
    k: int,
    hops: int,
    redundancy_pruning: bool = True,
    layerwise_top_pruning: bool = True,
) -> set[str]:
    retrieved: set[str] = set()
    queries = [np.asarray(q0, dtype=np.float64)]
    for layer in range(1, hops + 1):
        selected = []
        for q in queries:
            scored = sorted((-cosine(q, emb), cid) for cid, emb in chunks.items())
            for neg_score, cid in scored[:k]:
                if redundancy_pruning and cid in retrieved:
                    continue
                selected.append((q, cid, -neg_score))
        queries = []
        if not selected:
            break
        if layerwise_top_pruning:
            ranked = sorted((s for _, _, s in selected), reverse=True)
            threshold = ranked[min(k, len(ranked)) - 1]
        else:
            threshold = -np.inf
        for q, cid, s in selected:
            if s >= threshold:
                retrieved.add(cid)
                if layer < hops:
                    queries.append(update(q, chunks[cid]))
    return retrieved
