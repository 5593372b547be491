"""Metrics, evaluation harness and comparison reports."""

from src.eval.harness import TimingRecorder, benchmark_grid, run_benchmark, run_eval
from src.eval.metrics import hit_rate, recall
from src.eval.report import compare

__all__ = [
    "TimingRecorder",
    "benchmark_grid",
    "compare",
    "hit_rate",
    "recall",
    "run_benchmark",
    "run_eval",
]
