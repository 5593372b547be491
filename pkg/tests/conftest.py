"""Pytest configuration and fixtures."""

import numpy as np
import pytest

from src.data.synthetic import SyntheticCorpus, generate_synthetic
from src.models.dataset import SynthConfig
from src.store.persistence import ingest_records
from src.store.vector_store import VectorStore, create_store


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator for test data."""
    return np.random.default_rng(1234)


@pytest.fixture
def one_hot_store() -> VectorStore:
    """Three orthogonal chunks a, b, c in dimension 3."""
    store = create_store(3)
    for chunk_id, vec in (("a", [1, 0, 0]), ("b", [0, 1, 0]), ("c", [0, 0, 1])):
        store.insert_vector(chunk_id, vec)
    return store.freeze()


def make_random_store(
    rng: np.random.Generator, n: int, d: int, prefix: str = "c"
) -> VectorStore:
    """Store of n random Gaussian chunks with zero-padded ids."""
    store = create_store(d)
    for i, vec in enumerate(rng.normal(size=(n, d))):
        store.insert_vector(f"{prefix}{i:05d}", vec)
    return store.freeze()


@pytest.fixture
def random_store(rng: np.random.Generator) -> VectorStore:
    """200 random chunks in dimension 16."""
    return make_random_store(rng, 200, 16)


@pytest.fixture
def small_synth_config() -> SynthConfig:
    """A corpus small enough for unit tests."""
    return SynthConfig(
        d=32,
        num_entities=90,
        num_relations=6,
        num_chains=20,
        chain_length=2,
        num_distractors=60,
        noise_sigma=0.02,
        seed=7,
    )


@pytest.fixture
def small_corpus(small_synth_config: SynthConfig) -> SyntheticCorpus:
    return generate_synthetic(small_synth_config)


@pytest.fixture
def corpus_store(small_corpus: SyntheticCorpus) -> VectorStore:
    return ingest_records(small_corpus.chunks)
