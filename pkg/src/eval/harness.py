"""Evaluation harness: recall, average K and per-query latency."""

import logging
import statistics
import time
from collections.abc import Iterator
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager

import numpy as np

from src.config import settings
from src.exceptions import DataError
from src.eval.metrics import hit_rate, recall
from src.model.params import ModelParams
from src.models.controller import ControllerConfig, HopTimings
from src.models.dataset import EvalQuery
from src.models.evaluation import BenchmarkEntry, EvalRow
from src.multihop.controller import direct_retrieve, multihop_retrieve
from src.store.vector_store import VectorStore

logger = logging.getLogger(__name__)

TIMING_REPEATS = 3


class TimingRecorder:
    """Accumulates wall-clock time of explicitly timed sections."""

    def __init__(self) -> None:
        self.sections = 0
        self.total_seconds = 0.0

    @contextmanager
    def section(self) -> Iterator[None]:
        started = time.perf_counter()
        try:
            yield
        finally:
            self.total_seconds += time.perf_counter() - started
            self.sections += 1


def retrieve_once(
    store: VectorStore,
    params: ModelParams | None,
    query: EvalQuery,
    config: ControllerConfig,
) -> tuple[list[str], HopTimings | None]:
    """Run one retriever on one query (direct top-K when params is None)."""
    q = np.asarray(query.query_emb, dtype=np.float64)
    if params is None:
        return direct_retrieve(store, q, config.top_k), None
    retrieved, trace = multihop_retrieve(store, params, q, config)
    return retrieved, trace.timings


def run_eval(
    store: VectorStore,
    params: ModelParams | None,
    queries: list[EvalQuery],
    config: ControllerConfig,
    label: str | None = None,
    repeats: int = TIMING_REPEATS,
    threads: int | None = None,
    recorder: TimingRecorder | None = None,
) -> EvalRow:
    """Evaluate one retriever over a query set.

    Recall and average K come from a (possibly parallel) pass over the
    queries. Latency is measured afterwards in `repeats` single-threaded
    runs, timing only the retrieval call of each query; the reported value
    is the median over runs of the mean seconds per query.

    Args:
        store: Store to search
        params: TreeHop parameters, or None for the direct top-K baseline
        queries: Evaluation queries (non-empty)
        config: Controller settings (hops ignored for the baseline)
        label: Row label (default: derived from config)
        repeats: Timing runs
        threads: Worker cap for the recall pass
        recorder: Receives every timed section

    Raises:
        DataError: If queries is empty
    """
    if not queries:
        raise DataError("No evaluation queries")
    if label is None:
        label = config.label if params is not None else f"Direct@{config.top_k}"
    recorder = recorder or TimingRecorder()
    workers = threads or settings.worker_count()

    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(
            pool.map(lambda q: retrieve_once(store, params, q, config)[0], queries)
        )
    recalls = [recall(r, q.gold_ids) for r, q in zip(results, queries, strict=True)]
    hits = [hit_rate(r, q.gold_ids) for r, q in zip(results, queries, strict=True)]

    latencies, retrieval_times, forward_times = [], [], []
    for _ in range(repeats):
        total = retrieval = forward = 0.0
        for query in queries:
            before = recorder.total_seconds
            with recorder.section():
                _, timings = retrieve_once(store, params, query, config)
            elapsed = recorder.total_seconds - before
            total += elapsed
            if timings is None:
                retrieval += elapsed
            else:
                retrieval += timings.retrieval_seconds
                forward += timings.forward_seconds
        latencies.append(total / len(queries))
        retrieval_times.append(retrieval / len(queries))
        forward_times.append(forward / len(queries))

    row = EvalRow(
        label=label,
        recall_at_k=float(np.mean(recalls)),
        hit_rate=float(np.mean(hits)),
        avg_k=float(np.mean([len(r) for r in results])),
        latency_seconds=statistics.median(latencies) if latencies else 0.0,
        retrieval_seconds=statistics.median(retrieval_times) if repeats else 0.0,
        forward_seconds=statistics.median(forward_times) if repeats else 0.0,
        query_count=len(queries),
        top_k=config.top_k,
        hops=config.hops if params is not None else 1,
    )
    logger.info(
        f"{row.label}: recall={row.recall_at_k:.4f} hit={row.hit_rate:.4f} "
        f"avg_k={row.avg_k:.2f} latency={row.latency_seconds * 1000:.3f}ms"
    )
    return row


def benchmark_grid(include_ablations: bool = True) -> list[BenchmarkEntry]:
    """Retrievers of the standard results table.

    Direct@5, Direct@10, TreeHop@5 at 2 and 3 iterations, TreeHop@10 at 2
    iterations, and optionally the stop-criterion ablations at K=5 iter2.
    """
    grid = [
        BenchmarkEntry(config=ControllerConfig(top_k=5, hops=1), use_model=False),
        BenchmarkEntry(config=ControllerConfig(top_k=10, hops=1), use_model=False),
        BenchmarkEntry(config=ControllerConfig(top_k=5, hops=2)),
        BenchmarkEntry(config=ControllerConfig(top_k=5, hops=3)),
        BenchmarkEntry(config=ControllerConfig(top_k=10, hops=2)),
    ]
    if include_ablations:
        for redundancy, layerwise in ((False, True), (True, False), (False, False)):
            grid.append(
                BenchmarkEntry(
                    config=ControllerConfig(
                        top_k=5,
                        hops=2,
                        redundancy_pruning=redundancy,
                        layerwise_top_pruning=layerwise,
                    )
                )
            )
    return grid


def run_benchmark(
    store: VectorStore,
    params: ModelParams | None,
    queries: list[EvalQuery],
    grid: list[BenchmarkEntry] | None = None,
    repeats: int = TIMING_REPEATS,
    threads: int | None = None,
) -> list[EvalRow]:
    """Evaluate every grid entry; model entries are skipped without params."""
    rows = []
    for entry in grid if grid is not None else benchmark_grid():
        if entry.use_model and params is None:
            logger.warning(f"Skipping {entry.label}: no model given")
            continue
        rows.append(
            run_eval(
                store,
                params if entry.use_model else None,
                queries,
                entry.config,
                label=entry.label,
                repeats=repeats,
                threads=threads,
            )
        )
    return rows
