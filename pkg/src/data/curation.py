"""Curation filters for decomposition records."""

import logging
from collections.abc import Collection

from src.models.dataset import CurationReport, DecompositionRecord, QuestionType

logger = logging.getLogger(__name__)

# Comparison questions are answered by direct lookups, not chained evidence
KEPT_TYPES = frozenset(
    {
        QuestionType.INFERENCE,
        QuestionType.COMPOSITIONAL,
        QuestionType.BRIDGE_COMPARISON,
    }
)

MIN_HOPS: dict[QuestionType, int] = {
    QuestionType.INFERENCE: 2,
    QuestionType.COMPOSITIONAL: 2,
    QuestionType.BRIDGE_COMPARISON: 2,
}


def integrity_problem(record: DecompositionRecord) -> str | None:
    """Reason a record fails the hop integrity check, or None."""
    minimum = MIN_HOPS.get(record.question_type, 2)
    if len(record.hops) < minimum:
        return f"{len(record.hops)} hops, need at least {minimum}"
    if len(record.hop_context_embs) != len(record.hops):
        return (
            f"{len(record.hop_context_embs)} hop embeddings for "
            f"{len(record.hops)} hops"
        )
    dim = len(record.query_emb)
    if any(len(emb) != dim for emb in record.hop_context_embs):
        return "hop embedding dimension differs from query embedding"
    gold = [hop.gold_chunk_id for hop in record.hops]
    if len(set(gold)) != len(gold):
        return "repeated gold chunk id"
    return None


def curate(
    records: list[DecompositionRecord],
    known_ids: Collection[str] | None = None,
) -> tuple[list[DecompositionRecord], CurationReport]:
    """Keep multi-hop records of the supported types with a sound decomposition.

    Drop reasons, checked in this order: "type" (comparison/other),
    "integrity" (too few hops, misaligned hop embeddings, repeated gold ids),
    "unresolvable" (a gold id missing from known_ids; skipped when
    known_ids is None). Kept records are ordered by question_id.

    Args:
        records: Records to filter
        known_ids: Chunk ids of the accompanying store

    Returns:
        (kept records, report with per-reason drop counts)
    """
    report = CurationReport(input_count=len(records))
    known = set(known_ids) if known_ids is not None else None
    kept: list[DecompositionRecord] = []

    for record in records:
        if record.question_type not in KEPT_TYPES:
            report.dropped["type"] += 1
            continue
        problem = integrity_problem(record)
        if problem is not None:
            logger.debug(f"Dropping {record.question_id}: {problem}")
            report.dropped["integrity"] += 1
            continue
        if known is not None:
            missing = [
                h.gold_chunk_id for h in record.hops if h.gold_chunk_id not in known
            ]
            if missing:
                logger.debug(f"Dropping {record.question_id}: unknown ids {missing}")
                report.dropped["unresolvable"] += 1
                continue
        kept.append(record)

    kept.sort(key=lambda r: r.question_id)
    report.kept_count = len(kept)
    report.hop_pair_count = sum(len(r.hops) - 1 for r in kept)

    dropped = sum(report.dropped.values())
    if dropped:
        logger.warning(
            f"Curation dropped {dropped}/{len(records)} records: {report.dropped}"
        )
    logger.info(
        f"Curation kept {report.kept_count} records "
        f"({report.hop_pair_count} hop pairs)"
    )
    return kept, report
