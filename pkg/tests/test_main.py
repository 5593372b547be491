"""Tests for the treehop command-line interface."""

import json
from pathlib import Path

import pytest

from src.config import settings
from src.main import cli_main

# Top-level --json keys per subcommand, as documented in the README
JSON_KEYS = {
    "ingest": {"store", "record_count", "dim", "digest"},
    "synth": {"chunks", "records", "queries", "files"},
    "curate": {"input_count", "kept_count", "hop_pair_count", "dropped"},
    "build-pairs": {"records", "examples", "pairs"},
    "train": {
        "epoch_losses",
        "steps",
        "example_count",
        "wall_clock_seconds",
        "config",
        "checkpoint_path",
    },
    "retrieve": {"retrieved", "trace"},
    "eval": {"rows", "comparison", "config", "store", "version"},
    "gradcheck": {
        "dims",
        "trials",
        "mode",
        "variant",
        "step",
        "tolerance",
        "max_rel_error",
        "error_floor",
        "worst_parameter",
        "values_checked",
        "passed",
    },
    "error": {"error", "detail"},
}


def run_json(capsys: pytest.CaptureFixture[str], *argv: str) -> tuple[int, dict]:
    """Run a subcommand with --json and parse its stdout."""
    code = cli_main([*argv, "--json"])
    out = capsys.readouterr().out.strip()
    return code, json.loads(out) if out else {}


@pytest.fixture
def synth_dir(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> Path:
    """A small synthetic corpus written by the synth subcommand."""
    out = tmp_path / "synth"
    code = cli_main(
        [
            "synth",
            "--out", str(out),
            "--dim", "16",
            "--entities", "60",
            "--relations", "5",
            "--chains", "10",
            "--distractors", "20",
            "--noise", "0.01",
            "--seed", "3",
        ]
    )  # fmt: skip
    capsys.readouterr()
    assert code == 0
    return out


@pytest.fixture
def store_file(synth_dir: Path, capsys: pytest.CaptureFixture[str]) -> Path:
    out = synth_dir / "store.bin"
    code = cli_main(
        ["ingest", "--input", str(synth_dir / "chunks.jsonl"), "--out", str(out)]
    )
    capsys.readouterr()
    assert code == 0
    return out


@pytest.fixture
def query_file(synth_dir: Path) -> Path:
    """First eval query as a standalone embedding file."""
    first = json.loads(
        (synth_dir / "queries.jsonl").read_text().splitlines()[0]
    )
    path = synth_dir / "query.json"
    path.write_text(json.dumps({"query_emb": first["query_emb"]}))
    return path


class TestSynthAndIngest:
    """Test corpus generation and store ingestion."""

    def test_synth_outputs(self, synth_dir):
        """Test the three JSONL files and the run manifest."""
        for name in ("chunks.jsonl", "records.jsonl", "queries.jsonl"):
            assert (synth_dir / name).is_file()
        manifest = json.loads((synth_dir / "manifest.json").read_text())
        assert manifest["subcommand"] == "synth"
        assert manifest["seed"] == 3
        assert manifest["effective_config"]["chains"] == 10
        assert len((synth_dir / "records.jsonl").read_text().splitlines()) == 10

    def test_ingest(self, synth_dir, store_file, capsys):
        """Test the store, its sidecar and manifest exist."""
        assert store_file.is_file()
        assert Path(str(store_file) + ".manifest.json").is_file()

        code, payload = run_json(
            capsys,
            "ingest",
            "--input", str(synth_dir / "chunks.jsonl"),
            "--out", str(synth_dir / "again.bin"),
        )  # fmt: skip
        assert code == 0
        assert payload["record_count"] == 40
        assert set(payload) == JSON_KEYS["ingest"]
        assert payload["dim"] == 16
        assert (synth_dir / "again.bin").read_bytes() == store_file.read_bytes()

    def test_wrong_dimension(self, synth_dir, capsys):
        """Test --dim mismatch is a data error."""
        code = cli_main(
            [
                "ingest",
                "--input", str(synth_dir / "chunks.jsonl"),
                "--out", str(synth_dir / "bad.bin"),
                "--dim", "8",
            ]
        )  # fmt: skip
        assert code == 2

    def test_invalid_synth_config(self, tmp_path, capsys):
        """Test too few entities for the chains is a usage error."""
        code = cli_main(
            ["synth", "--out", str(tmp_path), "--entities", "5", "--chains", "10"]
        )
        assert code == 1

    def test_synth_json_and_default_dim(self, tmp_path, capsys):
        """Test the synth payload and the DEFAULT_DIM fallback."""
        out = tmp_path / "synth"
        code, payload = run_json(
            capsys,
            "synth",
            "--out", str(out),
            "--entities", "30",
            "--relations", "3",
            "--chains", "4",
            "--distractors", "5",
        )  # fmt: skip
        assert code == 0
        assert set(payload) == JSON_KEYS["synth"]
        first = json.loads((out / "chunks.jsonl").read_text().splitlines()[0])
        assert len(first["embedding"]) == settings.DEFAULT_DIM

    def test_invalid_utf8_line(self, tmp_path, capsys):
        """Test undecodable bytes abort ingestion with their line number."""
        source = tmp_path / "chunks.jsonl"
        source.write_bytes(
            b'{"id": "a", "embedding": [1.0, 0.0]}\n'
            b'{"id": "b\xff", "embedding": [0.0, 1.0]}\n'
        )
        code, payload = run_json(
            capsys, "ingest", "--input", str(source), "--out", str(tmp_path / "s.bin")
        )
        assert code == 2
        assert payload["error"] == "FORMAT_ERROR"
        assert "line 2" in payload["detail"]

    def test_invalid_utf8_records(self, tmp_path, capsys):
        """Test curate reports undecodable record lines as format errors."""
        source = tmp_path / "records.jsonl"
        source.write_bytes(b"\n\xfe\xff\n")
        code, payload = run_json(
            capsys, "curate", "--input", str(source), "--out", str(tmp_path / "o")
        )
        assert code == 2
        assert "line 2" in payload["detail"]


@pytest.mark.integration
class TestPipeline:
    """Test curate, build-pairs, train, retrieve and eval end to end."""

    def test_full_pipeline(self, synth_dir, store_file, query_file, capsys):
        curated = synth_dir / "curated.jsonl"
        code, report = run_json(
            capsys,
            "curate",
            "--input", str(synth_dir / "records.jsonl"),
            "--store", str(store_file),
            "--out", str(curated),
        )  # fmt: skip
        assert code == 0
        assert report["kept_count"] == 10
        assert set(report) == JSON_KEYS["curate"]
        assert report["hop_pair_count"] == 10

        pairs = synth_dir / "pairs.jsonl"
        code, payload = run_json(
            capsys,
            "build-pairs",
            "--records", str(curated),
            "--store", str(store_file),
            "--out", str(pairs),
        )  # fmt: skip
        assert code == 0
        assert payload["examples"] == 10
        assert set(payload) == JSON_KEYS["build-pairs"]

        model = synth_dir / "model.bin"
        code, payload = run_json(
            capsys,
            "train",
            "--pairs", str(pairs),
            "--store", str(store_file),
            "--out", str(model),
            "--epochs", "2",
            "--batch-size", "4",
            "--lr", "0.005",
        )  # fmt: skip
        assert code == 0
        assert len(payload["epoch_losses"]) == 2
        assert set(payload) == JSON_KEYS["train"]
        assert payload["steps"] == 6
        assert model.is_file()

        trace = synth_dir / "trace.json"
        code, payload = run_json(
            capsys,
            "retrieve",
            "--store", str(store_file),
            "--model", str(model),
            "--query-emb", str(query_file),
            "--k", "3",
            "--hops", "2",
            "--trace", str(trace),
        )  # fmt: skip
        assert code == 0
        assert 3 <= len(payload["retrieved"]) <= 6
        assert set(payload) == JSON_KEYS["retrieve"]
        trace_json = json.loads(trace.read_text())
        assert trace_json["retrieved"] == payload["retrieved"]
        assert len(trace_json["layers"]) == 2

        report_file = synth_dir / "eval.json"
        code, payload = run_json(
            capsys,
            "eval",
            "--store", str(store_file),
            "--model", str(model),
            "--queries", str(synth_dir / "queries.jsonl"),
            "--repeats", "1",
            "--out", str(report_file),
        )  # fmt: skip
        assert code == 0
        assert set(payload) == JSON_KEYS["eval"]
        assert [row["label"] for row in payload["rows"]] == [
            "Direct@5",
            "TreeHop@5 iter2",
        ]
        assert payload["store"]["record_count"] == 40
        assert payload["comparison"]["baseline"] == "Direct@5"
        assert json.loads(report_file.read_text()) == payload

    def test_direct_retrieve(self, store_file, query_file, capsys):
        """Test single-hop retrieval needs no model."""
        code = cli_main(
            [
                "retrieve",
                "--store", str(store_file),
                "--query-emb", str(query_file),
                "--hops", "1",
                "--k", "4",
            ]
        )  # fmt: skip
        assert code == 0
        assert len(capsys.readouterr().out.split()) == 4

    def test_eval_direct_only(self, synth_dir, store_file, capsys):
        code, payload = run_json(
            capsys,
            "eval",
            "--store", str(store_file),
            "--queries", str(synth_dir / "queries.jsonl"),
            "--repeats", "1",
        )  # fmt: skip
        assert code == 0
        assert len(payload["rows"]) == 1
        assert payload["comparison"] is None


class TestConfigResolution:
    """Test flag, config file and default precedence."""

    def test_config_file(self, tmp_path, store_file, query_file, capsys):
        """Test config values apply and flags override them."""
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"k": 2, "hops": 1}))
        base = [
            "retrieve",
            "--store", str(store_file),
            "--query-emb", str(query_file),
            "--config", str(config),
        ]  # fmt: skip

        code, payload = run_json(capsys, *base)
        assert code == 0
        assert len(payload["retrieved"]) == 2

        code, payload = run_json(capsys, *base, "--k", "3")
        assert code == 0
        assert len(payload["retrieved"]) == 3

    def test_unknown_config_key(self, tmp_path, store_file, query_file, capsys):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"beam_width": 2}))
        code = cli_main(
            [
                "retrieve",
                "--store", str(store_file),
                "--query-emb", str(query_file),
                "--config", str(config),
            ]
        )  # fmt: skip
        assert code == 1

    def test_config_only(self, tmp_path, capsys):
        """Test a subcommand can take all its options from the config file."""
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"trials": 2, "dims": [2]}))
        code, payload = run_json(capsys, "gradcheck", "--config", str(config))
        assert code == 0
        assert payload["trials"] == 2


class TestExitCodes:
    """Test exit codes and error reporting."""

    def test_no_subcommand(self, capsys):
        assert cli_main([]) == 1

    def test_missing_required_option(self, tmp_path, capsys):
        assert cli_main(["ingest", "--out", str(tmp_path / "x.bin")]) == 1

    def test_missing_input_file(self, tmp_path, capsys):
        """Test a missing file is a data error reported as JSON."""
        code, payload = run_json(
            capsys,
            "ingest",
            "--input", str(tmp_path / "missing.jsonl"),
            "--out", str(tmp_path / "x.bin"),
        )  # fmt: skip
        assert code == 2
        assert payload["error"] == "DATA_ERROR"
        assert set(payload) == JSON_KEYS["error"]

    def test_multi_hop_without_model(self, store_file, query_file, capsys):
        """Test N > 1 without a checkpoint is a usage error."""
        code = cli_main(
            [
                "retrieve",
                "--store", str(store_file),
                "--query-emb", str(query_file),
                "--hops", "2",
            ]
        )  # fmt: skip
        assert code == 1

    def test_gradcheck_pass(self, tmp_path, capsys):
        """Test a passing gradient check exits 0 and records its result."""
        out = tmp_path / "gradcheck.json"
        code, payload = run_json(
            capsys,
            "gradcheck",
            "--dim", "4",
            "--trials", "4",
            "--out", str(out),
        )  # fmt: skip
        assert code == 0
        assert payload["passed"] is True
        assert set(payload) == JSON_KEYS["gradcheck"]
        assert payload["error_floor"] == pytest.approx(1e-2)
        assert payload["max_rel_error"] < 1e-4
        assert json.loads(out.read_text())["dims"] == [4]

    def test_gradcheck_fail(self, capsys):
        """Test an unreachable tolerance exits with the numeric error code."""
        code = cli_main(
            ["gradcheck", "--dims", "2", "--trials", "2", "--tolerance", "1e-30"]
        )
        assert code == 3
        assert "FAIL" in capsys.readouterr().out

    def test_gradcheck_summary_names_floor(self, capsys):
        """Test the text summary shows the denominator floor and tolerance."""
        code = cli_main(["gradcheck", "--dims", "2", "--trials", "1"])
        out = capsys.readouterr().out
        assert code == 0
        assert "denominator floor 0.01" in out
        assert "PASS" in out

    def test_version(self, capsys):
        """Test --version prints the application name and version."""
        assert cli_main(["--version"]) == 0
        out = capsys.readouterr().out
        assert out.strip() == f"{settings.APP_NAME} {settings.APP_VERSION}"
