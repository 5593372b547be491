#!/usr/bin/env python3
"""Desk-scale acceptance run on a synthetic corpus.

Checks:
- Retrieved-set growth stays linear with both prunings on (K=5, N=2 and 3)
  and reaches 25 candidates at N=2 with both off
- A trained model beats Direct@5 and the untrained q - c controller on
  Recall@5 at two iterations
- Latency at N=3 is at most 5x the N=1 latency, and the model forward count
  equals the surviving-branch count

Usage:
    python scripts/run_acceptance.py [--epochs N] [--out report.json]
"""

import argparse
import json
import sys
import time
from datetime import datetime
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from src.data.pairs import build_train_examples  # noqa: E402
from src.data.synthetic import generate_synthetic  # noqa: E402
from src.eval.harness import run_eval  # noqa: E402
from src.eval.report import compare  # noqa: E402
from src.model.params import zero_params  # noqa: E402
from src.models.controller import ControllerConfig  # noqa: E402
from src.models.dataset import SynthConfig  # noqa: E402
from src.models.training import TrainConfig  # noqa: E402
from src.multihop.controller import multihop_retrieve  # noqa: E402
from src.store.persistence import ingest_records  # noqa: E402
from src.training.trainer import train  # noqa: E402

CORPUS = SynthConfig(
    d=64,
    num_entities=1500,
    num_relations=50,
    num_chains=500,
    chain_length=2,
    num_distractors=4000,
    noise_sigma=0.05,
    seed=42,
)
LATENCY_RATIO_LIMIT = 5.0
DESK_LEARNING_RATE = 5e-2


def check_growth(store, queries, params) -> list[str]:
    """Linear growth with pruning, exponential candidates without."""
    errors = []
    for hops, bound in ((2, 10), (3, 15)):
        config = ControllerConfig(top_k=5, hops=hops)
        sizes = []
        for query in queries:
            retrieved, trace = multihop_retrieve(store, params, query.query_emb, config)
            surplus = sum(layer.tie_surplus for layer in trace.layers)
            sizes.append(len(retrieved))
            if len(retrieved) > bound + surplus:
                errors.append(
                    f"{query.question_id}: {len(retrieved)} > {bound} at N={hops}"
                )
        print(
            f"    N={hops}: mean {np.mean(sizes):.2f}, max {max(sizes)} "
            f"(bound {bound})"
        )

    config = ControllerConfig(
        top_k=5, hops=2, redundancy_pruning=False, layerwise_top_pruning=False
    )
    for query in queries:
        _, trace = multihop_retrieve(store, params, query.query_emb, config)
        if trace.layers[1].candidates != 25:
            errors.append(
                f"{query.question_id}: {trace.layers[1].candidates} candidates "
                "without pruning (expected 25)"
            )
    return errors


def check_recall(store, corpus, params) -> tuple[list[str], list]:
    """Trained TreeHop against Direct@5 and the untrained controller."""
    controller = ControllerConfig(top_k=5, hops=2)
    rows = [
        run_eval(store, None, corpus.queries, controller),
        run_eval(
            store,
            zero_params(store.dim),
            corpus.queries,
            controller,
            label="Untrained (q - c) iter2",
        ),
        run_eval(store, params, corpus.queries, controller),
    ]
    direct, untrained, trained = rows
    errors = []
    if trained.recall_at_k <= direct.recall_at_k:
        errors.append(
            f"trained recall {trained.recall_at_k:.4f} <= direct "
            f"{direct.recall_at_k:.4f}"
        )
    if trained.recall_at_k <= untrained.recall_at_k:
        errors.append(
            f"trained recall {trained.recall_at_k:.4f} <= untrained "
            f"{untrained.recall_at_k:.4f}"
        )
    return errors, rows


def check_latency(store, queries, params) -> list[str]:
    """Latency shape across iterations and forward-count accounting."""
    errors = []
    one = run_eval(store, params, queries, ControllerConfig(top_k=5, hops=1))
    three = run_eval(store, params, queries, ControllerConfig(top_k=5, hops=3))
    ratio = three.latency_seconds / one.latency_seconds
    print(
        f"    N=1 {one.latency_seconds * 1000:.3f}ms, "
        f"N=3 {three.latency_seconds * 1000:.3f}ms (ratio {ratio:.2f})"
    )
    if ratio > LATENCY_RATIO_LIMIT:
        errors.append(f"latency ratio {ratio:.2f} > {LATENCY_RATIO_LIMIT}")

    for query in queries:
        _, trace = multihop_retrieve(
            store, params, query.query_emb, ControllerConfig(top_k=5, hops=3)
        )
        expected = sum(layer.surviving_branches for layer in trace.layers)
        if trace.forward_count != expected:
            errors.append(
                f"{query.question_id}: {trace.forward_count} forwards, "
                f"{expected} surviving branches"
            )
    return errors


def main():
    """Main entry point."""
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--epochs", type=int, default=20)
    parser.add_argument("--lr", type=float, default=DESK_LEARNING_RATE)
    parser.add_argument("--out", help="Write the results as JSON")
    args = parser.parse_args()

    print("=" * 60)
    print("TreeHop Acceptance Run")
    print("=" * 60)
    print(f"Date: {datetime.now().strftime('%Y-%m-%d %H:%M')}")

    started = time.perf_counter()
    corpus = generate_synthetic(CORPUS)
    store = ingest_records(corpus.chunks)
    print(
        f"\nCorpus: {len(store)} chunks, {len(corpus.queries)} queries "
        f"(d={store.dim})"
    )

    config = TrainConfig(learning_rate=args.lr, epochs=args.epochs)
    examples = build_train_examples(
        corpus.records, store, config, np.random.default_rng(config.seed)
    )
    params, report = train(examples, store, config)
    print(
        f"Trained {report.steps} steps: loss {report.epoch_losses[0]:.4f} -> "
        f"{report.epoch_losses[-1]:.4f} ({report.wall_clock_seconds:.1f}s)"
    )

    results = {}
    print("\n[1] Pruning growth")
    results["growth"] = check_growth(store, corpus.queries, params)
    print("\n[2] Recall against baselines")
    results["recall"], rows = check_recall(store, corpus, params)
    print(compare(rows).markdown)
    print("[3] Latency shape")
    results["latency"] = check_latency(store, corpus.queries, params)

    print("\n" + "=" * 60)
    print("Summary")
    print("=" * 60)
    for name, errors in results.items():
        print(f"{name}: {'OK' if not errors else f'{len(errors)} error(s)'}")
        for error in errors[:10]:
            print(f"  - {error}")
    print(f"Elapsed: {time.perf_counter() - started:.1f}s")

    if args.out:
        Path(args.out).write_text(
            json.dumps(
                {
                    "errors": results,
                    "rows": [row.model_dump() for row in rows],
                    "epoch_losses": report.epoch_losses,
                },
                indent=2,
            )
            + "\n",
            encoding="utf-8",
        )

    if all(not errors for errors in results.values()):
        print("\n[OK] All acceptance checks passed")
        sys.exit(0)
    else:
        print("\n[FAIL] Acceptance checks failed")
        sys.exit(1)


if __name__ == "__main__":
    main()
