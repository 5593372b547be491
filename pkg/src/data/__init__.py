"""Dataset preparation: curation, training pairs and synthetic corpora."""

from src.data.curation import curate
from src.data.pairs import build_train_examples
from src.data.synthetic import SyntheticCorpus, generate_synthetic, write_synthetic

__all__ = [
    "SyntheticCorpus",
    "build_train_examples",
    "curate",
    "generate_synthetic",
    "write_synthetic",
]
