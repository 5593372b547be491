"""Tests for curation, training-pair construction and the synthetic corpus."""

import numpy as np
import pytest

from src.data.curation import curate, integrity_problem
from src.data.pairs import build_train_examples
from src.data.synthetic import generate_synthetic, triple_id, write_synthetic
from src.exceptions import ConfigError, DataError, UnknownChunkError
from src.models.chunk import ChunkRecord
from src.models.dataset import (
    DecompositionRecord,
    EvalQuery,
    Hop,
    QuestionType,
    SynthConfig,
)
from src.models.training import TrainConfig
from src.store.persistence import ingest_records
from src.utils.jsonl import read_jsonl
from tests.conftest import make_random_store


def make_record(
    question_id: str,
    gold: list[str],
    question_type: QuestionType = QuestionType.COMPOSITIONAL,
    d: int = 4,
) -> DecompositionRecord:
    """Record whose embeddings are simple constants of dimension d."""
    return DecompositionRecord(
        question_id=question_id,
        question_type=question_type,
        hops=[Hop(sub_query=f"step {i}", gold_chunk_id=g) for i, g in enumerate(gold)],
        query_emb=[1.0] * d,
        hop_context_embs=[[float(i + 1)] * d for i in range(len(gold))],
    )


class TestCuration:
    """Test the curation filters."""

    def test_filters(self):
        """Test each drop reason and the kept ordering."""
        records = [
            make_record("q3", ["a", "b"]),
            make_record("q1", ["a", "b", "c"], QuestionType.INFERENCE),
            make_record("q2", ["a", "b"], QuestionType.COMPARISON),
            make_record("q4", ["a"]),
            make_record("q5", ["a", "a"]),
            make_record("q6", ["a", "z"], QuestionType.BRIDGE_COMPARISON),
        ]
        kept, report = curate(records, known_ids={"a", "b", "c"})

        assert [r.question_id for r in kept] == ["q1", "q3"]
        assert report.input_count == 6
        assert report.kept_count == 2
        assert report.dropped == {"type": 1, "integrity": 2, "unresolvable": 1}
        assert report.hop_pair_count == 3

    def test_idempotent(self):
        """Test curating kept records keeps them all."""
        records = [make_record(f"q{i}", ["a", "b", "c"][: 2 + i % 2]) for i in range(5)]
        kept, _ = curate(records)
        again, report = curate(kept)
        assert again == kept
        assert sum(report.dropped.values()) == 0

    def test_without_known_ids(self):
        """Test gold id resolution is skipped when no ids are given."""
        kept, report = curate([make_record("q1", ["x", "y"])])
        assert len(kept) == 1
        assert report.dropped["unresolvable"] == 0

    def test_misaligned_hop_embeddings(self):
        """Test hop embeddings must align with hops."""
        record = make_record("q1", ["a", "b"])
        record.hop_context_embs = record.hop_context_embs[:1]
        assert "hop embeddings" in integrity_problem(record)

    def test_hop_embedding_dimension(self):
        """Test hop embeddings must share the query dimension."""
        record = make_record("q1", ["a", "b"])
        record.hop_context_embs[1] = [1.0, 2.0]
        assert "dimension" in integrity_problem(record)

    def test_sound_record(self):
        assert integrity_problem(make_record("q1", ["a", "b"])) is None


class TestBuildTrainExamples:
    """Test teacher-forced training pair construction."""

    @pytest.fixture
    def store(self, rng):
        store = make_random_store(rng, 30, 4)
        return store

    def test_four_hop_record(self, store, rng):
        """Test a 4-hop record yields 3 examples wired hop to hop."""
        gold = store.ids[:4]
        record = make_record("q1", gold)
        examples = build_train_examples([record], store, TrainConfig(), rng)

        assert len(examples) == 3
        assert examples[0].query_emb == record.query_emb
        assert examples[1].query_emb == record.hop_context_embs[1]
        assert examples[2].query_emb == record.hop_context_embs[2]
        for r, example in enumerate(examples):
            assert example.context_id == gold[r]
            assert example.positive_id == gold[r + 1]
            np.testing.assert_array_equal(
                example.context_emb, store.get_embedding(gold[r])
            )
            assert len(example.negative_ids) == 5
            assert len(set(example.negative_ids)) == 5
            assert gold[r] not in example.negative_ids
            assert gold[r + 1] not in example.negative_ids

    def test_example_count(self, small_synth_config):
        """Test the example count equals the sum of (hops - 1)."""
        config = small_synth_config.model_copy(
            update={"chain_length": 3, "num_entities": 100}
        )
        corpus = generate_synthetic(config)
        store = ingest_records(corpus.chunks)
        examples = build_train_examples(
            corpus.records, store, TrainConfig(), np.random.default_rng(0)
        )
        assert len(examples) == sum(len(r.hops) - 1 for r in corpus.records)
        assert len(examples) == 2 * len(corpus.records)

    def test_unknown_positive(self, store, rng):
        """Test a gold id missing from the store."""
        record = make_record("q1", [store.ids[0], "missing"])
        with pytest.raises(UnknownChunkError):
            build_train_examples([record], store, TrainConfig(), rng)

    def test_repeated_chunk(self, store, rng):
        """Test a positive equal to its context chunk."""
        record = make_record("q1", [store.ids[0], store.ids[0]])
        with pytest.raises(DataError):
            build_train_examples([record], store, TrainConfig(), rng)

    def test_seeded(self, store):
        """Test the same seed samples the same negatives."""
        record = make_record("q1", store.ids[:3])
        first = build_train_examples(
            [record], store, TrainConfig(), np.random.default_rng(5)
        )
        second = build_train_examples(
            [record], store, TrainConfig(), np.random.default_rng(5)
        )
        assert first == second


class TestSyntheticCorpus:
    """Test the synthetic compositional corpus."""

    def test_shape(self, small_synth_config, small_corpus):
        """Test record, query and chunk counts."""
        config = small_synth_config
        assert len(small_corpus.records) == config.num_chains
        assert len(small_corpus.queries) == config.num_chains
        assert len(small_corpus.chunks) == (
            config.num_chains * config.chain_length + config.num_distractors
        )
        ids = [c.id for c in small_corpus.chunks]
        assert len(set(ids)) == len(ids)

    def test_records_survive_curation(self, small_corpus):
        """Test generated records are all kept by curation."""
        known = {c.id for c in small_corpus.chunks}
        kept, report = curate(small_corpus.records, known_ids=known)
        assert len(kept) == len(small_corpus.records)
        assert report.hop_pair_count == len(small_corpus.records)

    def test_chain_entities_disjoint(self, small_corpus):
        """Test no entity appears in two chains."""
        seen: set[int] = set()
        for chain in small_corpus.chains:
            entities = {chain[0][0]} | {tail for _, _, tail in chain}
            assert not entities & seen
            seen |= entities

    def test_gold_ids(self, small_corpus):
        """Test eval queries list the chain's facts as gold."""
        for chain, query in zip(small_corpus.chains, small_corpus.queries, strict=True):
            assert query.gold_ids == [triple_id(t) for t in chain]

    def test_deterministic(self, small_synth_config):
        """Test the same config reproduces the corpus exactly."""
        first = generate_synthetic(small_synth_config)
        second = generate_synthetic(small_synth_config)
        assert first.chunks == second.chunks
        assert first.records == second.records
        np.testing.assert_array_equal(first.entities, second.entities)

    def test_seed_changes_corpus(self, small_synth_config):
        other = generate_synthetic(small_synth_config.model_copy(update={"seed": 8}))
        assert other.chunks != generate_synthetic(small_synth_config).chunks

    def test_separable(self):
        """Test the ideal hop-2 query ranks the gold hop-2 chunk first."""
        corpus = generate_synthetic(
            SynthConfig(
                d=1024,
                num_entities=60,
                num_relations=10,
                num_chains=20,
                chain_length=2,
                noise_sigma=0.0,
                seed=3,
            )
        )
        store = ingest_records(corpus.chunks)
        for i, query in enumerate(corpus.queries):
            hit = store.top_k(corpus.oracle_query(i, 2), 1)[0]
            assert hit.chunk_id == query.gold_ids[1]

    def test_direct_finds_first_hop(self):
        """Test the question embedding retrieves its hop-1 fact first."""
        corpus = generate_synthetic(
            SynthConfig(
                d=1024,
                num_entities=60,
                num_relations=10,
                num_chains=20,
                chain_length=2,
                noise_sigma=0.0,
                seed=3,
            )
        )
        store = ingest_records(corpus.chunks)
        for query in corpus.queries:
            assert store.top_k(query.query_emb, 1)[0].chunk_id == query.gold_ids[0]

    def test_not_enough_distractors(self):
        """Test asking for more distractors than unused facts exist."""
        config = SynthConfig(
            d=8,
            num_entities=3,
            num_relations=1,
            num_chains=1,
            chain_length=2,
            num_distractors=5,
        )
        with pytest.raises(ConfigError):
            generate_synthetic(config)

    def test_too_few_entities(self):
        """Test the config rejects chains that cannot have distinct entities."""
        with pytest.raises(ValueError):
            SynthConfig(num_entities=5, num_chains=2, chain_length=2)

    def test_write(self, small_corpus, tmp_path):
        """Test the three JSONL files are written and readable."""
        paths = write_synthetic(small_corpus, tmp_path / "synth")
        assert read_jsonl(paths["chunks"], ChunkRecord) == small_corpus.chunks
        assert len(read_jsonl(paths["records"], DecompositionRecord)) == len(
            small_corpus.records
        )
        assert read_jsonl(paths["queries"], EvalQuery) == small_corpus.queries
