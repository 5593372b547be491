"""Synthetic compositional multi-hop corpus.

Entities and relations are random unit vectors. A fact (head, relation,
tail) is the chunk normalize(e_head + r + e_tail + noise). A chain
a -r1-> b -r2-> c yields one chunk per hop and the question embedding
normalize(e_a + r1 + r2 + noise), so the ideal hop-2 query e_b + r2 is known
in closed form.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from src.exceptions import ConfigError
from src.models.chunk import ChunkRecord
from src.models.dataset import (
    DecompositionRecord,
    EvalQuery,
    Hop,
    QuestionType,
    SynthConfig,
)
from src.utils.jsonl import write_jsonl

logger = logging.getLogger(__name__)

Triple = tuple[int, int, int]

CHUNKS_FILE = "chunks.jsonl"
RECORDS_FILE = "records.jsonl"
QUERIES_FILE = "queries.jsonl"


@dataclass
class SyntheticCorpus:
    """Generated corpus plus the latent vectors it was built from."""

    config: SynthConfig
    entities: np.ndarray
    relations: np.ndarray
    chains: list[list[Triple]] = field(default_factory=list)
    chunks: list[ChunkRecord] = field(default_factory=list)
    records: list[DecompositionRecord] = field(default_factory=list)
    queries: list[EvalQuery] = field(default_factory=list)

    def oracle_query(self, chain_idx: int, hop: int) -> np.ndarray:
        """Ideal hop query e_head + r for hop (1-based) of a chain."""
        head, rel, _ = self.chains[chain_idx][hop - 1]
        return _normalize(self.entities[head] + self.relations[rel])


def triple_id(triple: Triple) -> str:
    head, rel, tail = triple
    return f"e{head}-r{rel}-e{tail}"


def _normalize(vec: np.ndarray) -> np.ndarray:
    return vec / np.linalg.norm(vec)


def _unit_rows(rng: np.random.Generator, n: int, d: int) -> np.ndarray:
    rows = rng.normal(size=(n, d))
    return rows / np.linalg.norm(rows, axis=1, keepdims=True)


def generate_synthetic(config: SynthConfig) -> SyntheticCorpus:
    """Generate chains, distractor facts, decomposition records and eval queries.

    Each chain uses chain_length + 1 distinct entities not shared with any
    other chain. Distractors are random facts not used by any chain.
    Output is a deterministic function of config.

    Raises:
        ConfigError: If not enough unused facts exist for num_distractors
    """
    rng = np.random.default_rng(config.seed)
    d, sigma, length = config.d, config.noise_sigma, config.chain_length
    entities = _unit_rows(rng, config.num_entities, d)
    relations = _unit_rows(rng, config.num_relations, d)
    corpus = SyntheticCorpus(config=config, entities=entities, relations=relations)

    def fact_chunk(triple: Triple) -> ChunkRecord:
        head, rel, tail = triple
        vec = entities[head] + relations[rel] + entities[tail]
        vec = _normalize(vec + rng.normal(0.0, sigma, size=d))
        return ChunkRecord(
            id=triple_id(triple),
            title=f"e{head}",
            text=f"e{head} r{rel} e{tail}",
            embedding=vec.tolist(),
        )

    order = rng.permutation(config.num_entities)
    used: set[Triple] = set()
    for i in range(config.num_chains):
        ents = [int(e) for e in order[i * (length + 1) : (i + 1) * (length + 1)]]
        rels = [int(r) for r in rng.integers(config.num_relations, size=length)]
        chain = [(ents[h], rels[h], ents[h + 1]) for h in range(length)]
        corpus.chains.append(chain)
        used.update(chain)
        corpus.chunks.extend(fact_chunk(t) for t in chain)

        query = entities[ents[0]] + relations[rels].sum(axis=0)
        query = _normalize(query + rng.normal(0.0, sigma, size=d)).tolist()
        question_id = f"q{i:05d}"
        gold = [triple_id(t) for t in chain]
        corpus.records.append(
            DecompositionRecord(
                question_id=question_id,
                question_type=QuestionType.COMPOSITIONAL,
                hops=[
                    Hop(sub_query=f"What is r{rel} of e{head}?", gold_chunk_id=tid)
                    for (head, rel, _), tid in zip(chain, gold, strict=True)
                ],
                query_emb=query,
                hop_context_embs=[
                    corpus.oracle_query(i, h).tolist() for h in range(1, length + 1)
                ],
            )
        )
        corpus.queries.append(
            EvalQuery(question_id=question_id, query_emb=query, gold_ids=gold)
        )

    capacity = config.num_entities * (config.num_entities - 1) * config.num_relations
    if config.num_distractors > capacity - len(used):
        raise ConfigError(
            f"Cannot draw {config.num_distractors} distractors: only "
            f"{capacity - len(used)} unused facts exist"
        )
    drawn = 0
    while drawn < config.num_distractors:
        head, tail = (int(x) for x in rng.choice(config.num_entities, 2, replace=False))
        triple = (head, int(rng.integers(config.num_relations)), tail)
        if triple in used:
            continue
        used.add(triple)
        corpus.chunks.append(fact_chunk(triple))
        drawn += 1

    logger.info(
        f"Generated {len(corpus.chunks)} chunks, {len(corpus.records)} chains "
        f"(d={d}, length={length}, sigma={sigma})"
    )
    return corpus


def write_synthetic(corpus: SyntheticCorpus, out_dir: str | Path) -> dict[str, Path]:
    """Write chunks, decomposition records and eval queries as JSONL.

    Returns:
        Mapping of "chunks", "records", "queries" to the written paths
    """
    out_dir = Path(out_dir)
    paths = {
        "chunks": out_dir / CHUNKS_FILE,
        "records": out_dir / RECORDS_FILE,
        "queries": out_dir / QUERIES_FILE,
    }
    write_jsonl(paths["chunks"], corpus.chunks)
    write_jsonl(paths["records"], corpus.records)
    write_jsonl(paths["queries"], corpus.queries)
    return paths
