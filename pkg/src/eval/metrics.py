"""Retrieval metrics."""

from collections.abc import Iterable

from src.exceptions import DataError


def recall(retrieved: Iterable[str], gold: Iterable[str]) -> float:
    """Fraction of gold chunks present in the retrieved set.

    Raises:
        DataError: If gold is empty
    """
    gold_set = set(gold)
    if not gold_set:
        raise DataError("Recall is undefined for an empty gold set")
    return len(gold_set.intersection(retrieved)) / len(gold_set)


def hit_rate(retrieved: Iterable[str], gold: Iterable[str]) -> float:
    """1.0 when every gold chunk was retrieved, else 0.0."""
    return 1.0 if recall(retrieved, gold) == 1.0 else 0.0
