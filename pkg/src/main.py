"""TreeHop command-line interface.

Subcommands: ingest, synth, curate, build-pairs, train, retrieve, eval,
gradcheck. Every subcommand accepts --seed, --json and --config. Option
values resolve as command-line flag, then config file key, then default.
"""

import argparse
import json
import logging
import sys
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import Any, NoReturn

import numpy as np
from pydantic import ValidationError

from src.audit import RunRecorder, fingerprint_store
from src.config import settings
from src.data.curation import curate
from src.data.pairs import build_train_examples
from src.data.synthetic import generate_synthetic, write_synthetic
from src.eval.harness import benchmark_grid, run_benchmark
from src.eval.report import compare
from src.exceptions import (
    EXIT_DATA,
    EXIT_NUMERIC,
    EXIT_OK,
    EXIT_USAGE,
    ConfigError,
    DataError,
    TreeHopError,
)
from src.model.checkpoint import load_params, save_params
from src.model.gradcheck import GradCheckMode, run_gradcheck
from src.models.controller import ControllerConfig
from src.models.dataset import DecompositionRecord, EvalQuery, SynthConfig
from src.models.evaluation import BenchmarkEntry, EvalReport
from src.models.training import ModelVariant, TrainConfig
from src.multihop.controller import multihop_retrieve
from src.store.persistence import ingest_jsonl, load_store, save_store
from src.store.similarity import as_vector
from src.training.dataset import load_train_examples, save_train_examples
from src.training.trainer import train
from src.utils.jsonl import read_jsonl, write_jsonl

logger = logging.getLogger(__name__)

# Defaults applied after the config file; None means "no default"
DEFAULTS: dict[str, Any] = {
    "seed": settings.DEFAULT_SEED,
    "dim": None,
    "normalize": settings.NORMALIZE_ON_INGEST,
    # synth
    "entities": 1500,
    "relations": 50,
    "chains": 500,
    "chain_length": 2,
    "distractors": 0,
    "noise": 0.0,
    # training
    "negatives": 5,
    "temperature": 0.15,
    "batch_size": 64,
    "lr": 6e-5,
    "beta1": 0.9,
    "beta2": 0.999,
    "eps": 1e-8,
    "weight_decay": 0.01,
    "epochs": 20,
    "dropout": 0.1,
    "variant": ModelVariant.FULL.value,
    "init": "glorot",
    # retrieval
    "k": settings.DEFAULT_TOP_K,
    "hops": settings.DEFAULT_HOPS,
    "redundancy_pruning": True,
    "layerwise_pruning": True,
    "normalize_next_query": settings.NORMALIZE_NEXT_QUERY,
    "benchmark": False,
    "repeats": 3,
    # gradcheck
    "dims": None,
    "trials": 100,
    "step": 1e-4,
    "tolerance": 1e-4,
    "mode": GradCheckMode.BOTH.value,
}

REQUIRED: dict[str, tuple[str, ...]] = {
    "ingest": ("input", "out"),
    "synth": ("out",),
    "curate": ("input", "out"),
    "build-pairs": ("records", "store", "out"),
    "train": ("pairs", "store", "out"),
    "retrieve": ("store", "query_emb"),
    "eval": ("store", "queries"),
    "gradcheck": (),
}

# Keys never read from a config file
_RESERVED = {"command", "config", "json", "handler"}


class CliParser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit with EXIT_USAGE."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class CommandResult:
    """Payload for --json plus a human-readable summary."""

    payload: Any
    summary: str
    exit_code: int = EXIT_OK


# Config and argument helpers


def load_config_file(path: str | None) -> dict[str, Any]:
    """Read a JSON config object; keys may use dashes or underscores.

    Raises:
        ConfigError: If the file is unreadable or not a JSON object
    """
    if path is None:
        return {}
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as e:
        raise ConfigError(f"Cannot read config file {path}: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"Config file {path} must contain a JSON object")
    return {key.replace("-", "_"): value for key, value in data.items()}


def resolve_args(args: argparse.Namespace) -> argparse.Namespace:
    """Fill unset options from --config, then DEFAULTS; check required ones.

    Raises:
        ConfigError: On unknown config keys or missing required options
    """
    config = load_config_file(args.config)
    known = set(vars(args)) - _RESERVED
    unknown = sorted(set(config) - known)
    if unknown:
        raise ConfigError(f"Unknown keys for {args.command} in config file: {unknown}")
    for key in known:
        if getattr(args, key) is None:
            setattr(args, key, config.get(key, DEFAULTS.get(key)))
    missing = [k for k in REQUIRED[args.command] if getattr(args, k) is None]
    if missing:
        flags = ", ".join(f"--{k.replace('_', '-')}" for k in missing)
        raise ConfigError(f"{args.command}: missing required option(s) {flags}")
    return args


def effective_config(args: argparse.Namespace) -> dict[str, Any]:
    return {
        key: value
        for key, value in sorted(vars(args).items())
        if key not in _RESERVED
    }


def recorder_for(args: argparse.Namespace) -> RunRecorder:
    return RunRecorder(
        args.command,
        seed=args.seed,
        config_path=args.config,
        effective_config=effective_config(args),
        embedding_model=args.embedding_model,
    )


def controller_config(args: argparse.Namespace) -> ControllerConfig:
    return ControllerConfig(
        top_k=args.k,
        hops=args.hops,
        redundancy_pruning=args.redundancy_pruning,
        layerwise_top_pruning=args.layerwise_pruning,
        normalize_next_query=args.normalize_next_query,
    )


def read_query_embedding(source: str) -> np.ndarray:
    """Query embedding from a JSON file (or "-" for stdin).

    Accepts a bare list or an object with "query_emb" or "embedding".

    Raises:
        DataError: If the JSON holds no usable vector
    """
    try:
        text = sys.stdin.read() if source == "-" else Path(source).read_text("utf-8")
        data = json.loads(text)
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise DataError(f"Query embedding in {source} is not valid JSON: {e}") from e
    if isinstance(data, dict):
        data = data.get("query_emb", data.get("embedding"))
    if not isinstance(data, list):
        raise DataError(f"No embedding vector found in {source}")
    return as_vector(data)


def write_json(path: str | Path, payload: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    return path


# Subcommands


def cmd_ingest(args: argparse.Namespace) -> CommandResult:
    recorder = recorder_for(args)
    recorder.add_input("chunks", args.input)
    store = ingest_jsonl(args.input, dim=args.dim, normalize_on_ingest=args.normalize)
    out = save_store(store, args.out)
    recorder.add_output("store", out)
    recorder.complete()
    fingerprint = fingerprint_store(store)
    return CommandResult(
        {"store": str(out), **fingerprint.model_dump()},
        f"Ingested {fingerprint.record_count} chunks (d={fingerprint.dim}) into {out}",
    )


def cmd_synth(args: argparse.Namespace) -> CommandResult:
    config = SynthConfig(
        d=args.dim or settings.DEFAULT_DIM,
        num_entities=args.entities,
        num_relations=args.relations,
        num_chains=args.chains,
        chain_length=args.chain_length,
        num_distractors=args.distractors,
        noise_sigma=args.noise,
        seed=args.seed,
    )
    corpus = generate_synthetic(config)
    paths = write_synthetic(corpus, args.out)
    recorder = recorder_for(args)
    for name, path in paths.items():
        recorder.add_output(name, path)
    recorder.complete(Path(args.out) / "manifest.json")
    return CommandResult(
        {
            "chunks": len(corpus.chunks),
            "records": len(corpus.records),
            "queries": len(corpus.queries),
            "files": {name: str(path) for name, path in paths.items()},
        },
        f"Wrote {len(corpus.chunks)} chunks and {len(corpus.records)} chains "
        f"to {args.out}",
    )


def cmd_curate(args: argparse.Namespace) -> CommandResult:
    recorder = recorder_for(args)
    recorder.add_input("records", args.input)
    records = read_jsonl(args.input, DecompositionRecord)
    known = None
    if args.store is not None:
        recorder.add_input("store", args.store)
        known = load_store(args.store).ids
    kept, report = curate(records, known_ids=known)
    write_jsonl(args.out, kept)
    recorder.add_output("records", args.out)
    if args.report is not None:
        recorder.add_output("report", write_json(args.report, report.model_dump()))
    recorder.complete()
    return CommandResult(
        report.model_dump(),
        f"Kept {report.kept_count}/{report.input_count} records "
        f"({report.hop_pair_count} hop pairs); dropped {report.dropped}",
    )


def cmd_build_pairs(args: argparse.Namespace) -> CommandResult:
    recorder = recorder_for(args)
    recorder.add_input("records", args.records)
    recorder.add_input("store", args.store)
    store = load_store(args.store)
    records = read_jsonl(args.records, DecompositionRecord)
    config = TrainConfig(num_negatives=args.negatives, seed=args.seed)
    examples = build_train_examples(
        records, store, config, np.random.default_rng(args.seed)
    )
    save_train_examples(args.out, examples)
    recorder.add_output("pairs", args.out)
    recorder.complete()
    return CommandResult(
        {"records": len(records), "examples": len(examples), "pairs": args.out},
        f"Wrote {len(examples)} training examples to {args.out}",
    )


def cmd_train(args: argparse.Namespace) -> CommandResult:
    config = TrainConfig(
        temperature=args.temperature,
        num_negatives=args.negatives,
        batch_size=args.batch_size,
        learning_rate=args.lr,
        beta1=args.beta1,
        beta2=args.beta2,
        eps=args.eps,
        weight_decay=args.weight_decay,
        epochs=args.epochs,
        seed=args.seed,
        dropout_rate=args.dropout,
        variant=args.variant,
        init_scheme=args.init,
    )
    recorder = recorder_for(args)
    recorder.add_input("pairs", args.pairs)
    recorder.add_input("store", args.store)
    store = load_store(args.store)
    examples = load_train_examples(args.pairs, store, config.num_negatives, args.seed)
    params, report = train(examples, store, config)
    out = save_params(params, args.out)
    report.checkpoint_path = str(out)
    recorder.add_output("model", out)
    if args.report is not None:
        recorder.add_output(
            "report", write_json(args.report, report.model_dump(mode="json"))
        )
    recorder.complete()
    final = report.epoch_losses[-1] if report.epoch_losses else float("nan")
    return CommandResult(
        report.model_dump(mode="json"),
        f"Trained {report.steps} steps over {config.epochs} epochs "
        f"(final loss {final:.6f}); checkpoint {out}",
    )


def cmd_retrieve(args: argparse.Namespace) -> CommandResult:
    recorder = recorder_for(args)
    recorder.add_input("store", args.store)
    store = load_store(args.store)
    params = None
    if args.model is not None:
        recorder.add_input("model", args.model)
        params = load_params(args.model, expected_dim=store.dim)
    if args.query_emb != "-":
        recorder.add_input("query", args.query_emb)
    query = read_query_embedding(args.query_emb)
    config = controller_config(args)

    retrieved, trace = multihop_retrieve(store, params, query, config)
    payload: dict[str, Any] = {"retrieved": retrieved, "trace": None}
    if args.trace is not None:
        write_json(args.trace, trace.model_dump(mode="json"))
        payload["trace"] = str(args.trace)
        recorder.add_output("trace", args.trace)
    recorder.complete()
    return CommandResult(payload, "\n".join(retrieved))


def cmd_eval(args: argparse.Namespace) -> CommandResult:
    recorder = recorder_for(args)
    recorder.add_input("store", args.store)
    recorder.add_input("queries", args.queries)
    store = load_store(args.store)
    queries = read_jsonl(args.queries, EvalQuery)
    params = None
    if args.model is not None:
        recorder.add_input("model", args.model)
        params = load_params(args.model, expected_dim=store.dim)
    config = controller_config(args)

    if args.benchmark:
        rows = run_benchmark(store, params, queries, benchmark_grid(), args.repeats)
    else:
        grid = [BenchmarkEntry(config=config, use_model=False)]
        if params is not None:
            grid.append(BenchmarkEntry(config=config))
        rows = run_benchmark(store, params, queries, grid, args.repeats)

    comparison = compare(rows) if len(rows) >= 2 else None
    report = EvalReport(
        rows=rows,
        comparison=comparison,
        config=effective_config(args),
        store=fingerprint_store(store),
        version=settings.APP_VERSION,
    )
    if args.out is not None:
        recorder.add_output("report", write_json(args.out, report.model_dump()))
    recorder.complete()

    if comparison is not None:
        summary = comparison.markdown
    else:
        row = rows[0]
        summary = (
            f"{row.label}: recall={row.recall_at_k:.4f} avg_k={row.avg_k:.2f} "
            f"latency={row.latency_seconds:.6f}s"
        )
    return CommandResult(report.model_dump(), summary)


def cmd_gradcheck(args: argparse.Namespace) -> CommandResult:
    dims = args.dims if args.dims is not None else [args.dim or 4]
    result = run_gradcheck(
        dims=dims,
        trials=args.trials,
        seed=args.seed,
        h=args.step,
        tolerance=args.tolerance,
        mode=args.mode,
        variant=ModelVariant(args.variant),
    )
    if args.out is not None:
        recorder = recorder_for(args)
        recorder.add_output("report", write_json(args.out, result.model_dump()))
        recorder.complete()
    status = "PASS" if result.passed else "FAIL"
    return CommandResult(
        result.model_dump(mode="json"),
        f"max relative error {result.max_rel_error:.3e} "
        f"(denominator floor {result.error_floor:g}, tolerance "
        f"{result.tolerance:g}): {status}",
        exit_code=EXIT_OK if result.passed else EXIT_NUMERIC,
    )


# Parser


def build_parser() -> CliParser:
    """Argument parser; every option defaults to None so config files apply."""
    common = CliParser(add_help=False)
    common.add_argument("--seed", type=int, help="RNG seed (default 42)")
    common.add_argument("--json", action="store_true", help="JSON on stdout")
    common.add_argument("--config", help="JSON file with option defaults")
    common.add_argument(
        "--embedding-model", help="Model that produced the input embeddings"
    )

    parser = CliParser(prog="treehop", description=__doc__)
    parser.add_argument(
        "--version",
        action="version",
        version=f"{settings.APP_NAME} {settings.APP_VERSION}",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=CliParser)

    def add(name: str, handler: Callable, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(handler=handler)
        return p

    def add_retrieval_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--store", help="Binary store file")
        p.add_argument("--model", help="Checkpoint (omit for direct retrieval)")
        p.add_argument("--k", type=int, help="Top-K per retrieval")
        p.add_argument("--hops", type=int, help="Retrieval layers N")
        p.add_argument("--redundancy-pruning", action=argparse.BooleanOptionalAction)
        p.add_argument("--layerwise-pruning", action=argparse.BooleanOptionalAction)
        p.add_argument(
            "--normalize-next-query", action=argparse.BooleanOptionalAction
        )

    p = add("ingest", cmd_ingest, "Build a binary store from chunk JSONL")
    p.add_argument("--input", help="Chunk JSONL")
    p.add_argument("--out", help="Binary store to write")
    p.add_argument("--dim", type=int, help="Expected embedding dimension")
    p.add_argument("--normalize", action=argparse.BooleanOptionalAction)

    p = add("synth", cmd_synth, "Generate a synthetic multi-hop corpus")
    p.add_argument("--out", help="Output directory")
    p.add_argument("--dim", type=int, help="Embedding dimension (DEFAULT_DIM)")
    p.add_argument("--entities", type=int)
    p.add_argument("--relations", type=int)
    p.add_argument("--chains", type=int)
    p.add_argument("--chain-length", type=int)
    p.add_argument("--distractors", type=int)
    p.add_argument("--noise", type=float)

    p = add("curate", cmd_curate, "Filter decomposition records")
    p.add_argument("--input", help="Decomposition record JSONL")
    p.add_argument("--out", help="Kept records JSONL")
    p.add_argument("--store", help="Store used to check gold ids")
    p.add_argument("--report", help="Curation report JSON")

    p = add("build-pairs", cmd_build_pairs, "Build training examples")
    p.add_argument("--records", help="Curated record JSONL")
    p.add_argument("--store", help="Binary store file")
    p.add_argument("--out", help="Training example JSONL")
    p.add_argument("--negatives", type=int)

    p = add("train", cmd_train, "Train a TreeHop checkpoint")
    p.add_argument("--pairs", help="Training example JSONL")
    p.add_argument("--store", help="Binary store file")
    p.add_argument("--out", help="Checkpoint to write")
    p.add_argument("--report", help="Training report JSON")
    p.add_argument("--negatives", type=int)
    p.add_argument("--temperature", type=float)
    p.add_argument("--batch-size", type=int)
    p.add_argument("--lr", type=float)
    p.add_argument("--beta1", type=float)
    p.add_argument("--beta2", type=float)
    p.add_argument("--eps", type=float)
    p.add_argument("--weight-decay", type=float)
    p.add_argument("--epochs", type=int)
    p.add_argument("--dropout", type=float)
    p.add_argument("--variant", choices=[v.value for v in ModelVariant])
    p.add_argument("--init", choices=["glorot", "zero"])

    p = add("retrieve", cmd_retrieve, "Multi-hop retrieval for one query")
    add_retrieval_flags(p)
    p.add_argument("--query-emb", help="JSON embedding file, or - for stdin")
    p.add_argument("--trace", help="Write the hop trace JSON here")

    p = add("eval", cmd_eval, "Evaluate retrievers on a query set")
    add_retrieval_flags(p)
    p.add_argument("--queries", help="Eval query JSONL")
    p.add_argument("--benchmark", action=argparse.BooleanOptionalAction)
    p.add_argument("--repeats", type=int, help="Timing runs (median reported)")
    p.add_argument("--out", help="Report JSON")

    p = add("gradcheck", cmd_gradcheck, "Finite-difference gradient check")
    p.add_argument("--dim", type=int, help="Dimension (default 4)")
    p.add_argument("--dims", type=int, nargs="+", help="Cycle over several dims")
    p.add_argument("--trials", type=int)
    p.add_argument("--step", type=float, help="Finite-difference step h")
    p.add_argument("--tolerance", type=float)
    p.add_argument("--mode", choices=[m.value for m in GradCheckMode])
    p.add_argument("--variant", choices=[v.value for v in ModelVariant])
    p.add_argument("--out", help="Result JSON")

    return parser


def _emit_error(args: argparse.Namespace | None, code: str, detail: str) -> None:
    logger.error(detail)
    if args is not None and getattr(args, "json", False):
        print(json.dumps({"error": code, "detail": detail}))


def cli_main(argv: Sequence[str] | None = None) -> int:
    """Run the CLI and return its exit code.

    Exit codes: 0 success, 1 usage/config error, 2 data/format error,
    3 numeric error (including a failed gradient check).
    """
    logging.basicConfig(
        level=settings.LOG_LEVEL, format=settings.LOG_FORMAT, stream=sys.stderr
    )
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else EXIT_USAGE

    try:
        resolve_args(args)
        result: CommandResult = args.handler(args)
    except ValidationError as e:
        _emit_error(args, ConfigError.code, f"Invalid configuration: {e}")
        return EXIT_USAGE
    except TreeHopError as e:
        if e.exit_code == EXIT_USAGE:
            parser.print_usage(sys.stderr)
        _emit_error(args, e.code, str(e))
        return e.exit_code
    except (FileNotFoundError, IsADirectoryError) as e:
        _emit_error(args, DataError.code, str(e))
        return EXIT_DATA

    if args.json:
        print(json.dumps(result.payload))
    else:
        print(result.summary)
    return result.exit_code


def main() -> None:
    """Console-script entry point."""
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
