"""Immutable in-memory dense-vector store with exact cosine retrieval."""

from src.store.persistence import load_store, save_store
from src.store.similarity import cosine_similarity
from src.store.vector_store import VectorStore, create_store

__all__ = [
    "VectorStore",
    "cosine_similarity",
    "create_store",
    "load_store",
    "save_store",
]
