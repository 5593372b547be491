"""Tests for metrics, the evaluation harness and comparison reports."""

import pytest

from src.eval.harness import (
    TimingRecorder,
    benchmark_grid,
    run_benchmark,
    run_eval,
)
from src.eval.metrics import hit_rate, recall
from src.eval.report import compare
from src.exceptions import DataError
from src.model.params import init_params, zero_params
from src.models.controller import ControllerConfig
from src.models.evaluation import EvalRow


def make_row(label: str, recall_at_k: float, avg_k: float, latency: float) -> EvalRow:
    return EvalRow(
        label=label,
        recall_at_k=recall_at_k,
        avg_k=avg_k,
        latency_seconds=latency,
        query_count=10,
        top_k=5,
    )


class TestMetrics:
    """Test recall and hit rate."""

    def test_recall(self):
        """Test gold-fraction recall."""
        assert recall(["a", "b"], ["a", "c"]) == 0.5
        assert recall([], ["a"]) == 0.0
        assert recall(["a", "c", "x"], ["a", "c"]) == 1.0

    def test_recall_monotone(self):
        """Test adding retrieved chunks never lowers recall."""
        gold = ["a", "b", "c"]
        retrieved: list[str] = []
        previous = 0.0
        for chunk_id in ["x", "a", "y", "c", "b"]:
            retrieved.append(chunk_id)
            current = recall(retrieved, gold)
            assert current >= previous
            previous = current
        assert previous == 1.0

    def test_empty_gold(self):
        with pytest.raises(DataError):
            recall(["a"], [])

    def test_hit_rate(self):
        """Test the all-or-nothing rate."""
        assert hit_rate(["a", "b"], ["a", "b"]) == 1.0
        assert hit_rate(["a"], ["a", "b"]) == 0.0


class TestRunEval:
    """Test the evaluation harness."""

    def test_single_hop_matches_direct(self, corpus_store, small_corpus):
        """Test TreeHop with N=1 scores exactly like the direct baseline."""
        config = ControllerConfig(top_k=5, hops=1)
        direct = run_eval(corpus_store, None, small_corpus.queries, config, repeats=1)
        treehop = run_eval(
            corpus_store,
            init_params(corpus_store.dim, 0),
            small_corpus.queries,
            config,
            repeats=1,
        )
        assert treehop.recall_at_k == direct.recall_at_k
        assert treehop.avg_k == direct.avg_k
        assert direct.label == "Direct@5"
        assert treehop.label == "TreeHop@5 iter1"

    def test_timed_sections(self, corpus_store, small_corpus):
        """Test only the retrieval calls are timed."""
        recorder = TimingRecorder()
        queries = small_corpus.queries[:7]
        row = run_eval(
            corpus_store,
            zero_params(corpus_store.dim),
            queries,
            ControllerConfig(top_k=5, hops=2),
            repeats=3,
            recorder=recorder,
        )
        assert recorder.sections == 3 * 7
        assert row.latency_seconds > 0
        assert row.query_count == 7
        assert row.hops == 2

    def test_average_k_bound(self, corpus_store, small_corpus):
        """Test average K stays within N*K with both prunings on."""
        row = run_eval(
            corpus_store,
            init_params(corpus_store.dim, 1),
            small_corpus.queries,
            ControllerConfig(top_k=5, hops=2),
            repeats=1,
        )
        assert 5 <= row.avg_k <= 10

    def test_direct_row(self, corpus_store, small_corpus):
        """Test the baseline reports one hop and K chunks per query."""
        row = run_eval(
            corpus_store,
            None,
            small_corpus.queries,
            ControllerConfig(top_k=3, hops=3),
            repeats=1,
        )
        assert row.hops == 1
        assert row.avg_k == 3
        assert row.forward_seconds == 0.0

    def test_no_queries(self, corpus_store):
        with pytest.raises(DataError):
            run_eval(corpus_store, None, [], ControllerConfig(hops=1))

    def test_custom_label(self, corpus_store, small_corpus):
        row = run_eval(
            corpus_store,
            None,
            small_corpus.queries[:2],
            ControllerConfig(hops=1),
            label="baseline",
            repeats=1,
        )
        assert row.label == "baseline"


class TestBenchmark:
    """Test the standard retriever grid."""

    def test_grid_labels(self):
        """Test the grid covers the results-table retrievers."""
        labels = [entry.label for entry in benchmark_grid()]
        assert labels == [
            "Direct@5",
            "Direct@10",
            "TreeHop@5 iter2",
            "TreeHop@5 iter3",
            "TreeHop@10 iter2",
            "TreeHop@5 iter2 w/o redundancy pruning",
            "TreeHop@5 iter2 w/o layer-wise top pruning",
            "TreeHop@5 iter2 w/o pruning",
        ]
        assert len(benchmark_grid(include_ablations=False)) == 5

    def test_without_model(self, corpus_store, small_corpus):
        """Test model entries are skipped when no model is given."""
        rows = run_benchmark(
            corpus_store, None, small_corpus.queries[:5], repeats=1
        )
        assert [row.label for row in rows] == ["Direct@5", "Direct@10"]

    def test_with_model(self, corpus_store, small_corpus):
        rows = run_benchmark(
            corpus_store,
            zero_params(corpus_store.dim),
            small_corpus.queries[:5],
            grid=benchmark_grid(include_ablations=False),
            repeats=1,
        )
        assert len(rows) == 5


class TestCompare:
    """Test comparison reports."""

    def test_identical_rows(self):
        """Test identical rows give zero deltas."""
        row = make_row("Direct@5", 0.5, 5.0, 0.01)
        report = compare([row, row.model_copy()])
        assert all(item.delta_recall == 0.0 for item in report.rows)
        assert all(item.delta_avg_k == 0.0 for item in report.rows)
        assert all(item.delta_latency == 0.0 for item in report.rows)

    def test_sorted_by_label(self):
        """Test rows are sorted by label while the first row stays the baseline."""
        rows = [
            make_row("TreeHop@5 iter2", 0.7, 8.0, 0.02),
            make_row("Direct@5", 0.5, 5.0, 0.01),
            make_row("Direct@10", 0.6, 10.0, 0.01),
        ]
        report = compare(rows)
        assert report.baseline == "TreeHop@5 iter2"
        assert [item.row.label for item in report.rows] == [
            "Direct@10",
            "Direct@5",
            "TreeHop@5 iter2",
        ]
        deltas = {item.row.label: item.delta_recall for item in report.rows}
        assert deltas["Direct@5"] == pytest.approx(-0.2)
        assert deltas["Direct@10"] == pytest.approx(-0.1)
        assert deltas["TreeHop@5 iter2"] == 0.0

    def test_markdown(self):
        """Test the rendered table marks the baseline."""
        report = compare(
            [make_row("Direct@5", 0.5, 5.0, 0.01), make_row("X", 0.75, 7.5, 0.02)]
        )
        lines = report.markdown.strip().splitlines()
        assert lines[0].startswith("| Retriever |")
        assert len(lines) == 4
        assert "Direct@5 (baseline)" in report.markdown
        assert "+0.2500" in lines[3]

    def test_too_few_rows(self):
        with pytest.raises(DataError):
            compare([make_row("Direct@5", 0.5, 5.0, 0.01)])
