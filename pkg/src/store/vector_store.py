"""Append-only dense-vector store with exact, deterministic top-K search."""

import logging
import threading
from collections.abc import Iterator, Sequence

import numpy as np

from src.config import settings
from src.exceptions import (
    ConfigError,
    DimensionError,
    DuplicateIdError,
    EmptyStoreError,
    StoreFrozenError,
    UnknownChunkError,
    ZeroNormError,
)
from src.models.chunk import ChunkMetadata, ChunkRecord, ScoredHit
from src.store.similarity import as_vector, l2_norm

logger = logging.getLogger(__name__)


class VectorStore:
    """In-memory chunk store.

    Embeddings are kept as float32 rows; scoring is done in float64 over the
    stored values, so scores are exact cosine similarities of what is stored.
    Ingestion is single-writer. Once frozen (or once queried) the matrix
    cache is shared read-only between threads.
    """

    def __init__(self, dim: int, normalize_on_ingest: bool | None = None):
        """Initialize an empty store.

        Args:
            dim: Embedding dimension d (>= 1)
            normalize_on_ingest: L2-normalize embeddings on insert
                (defaults to settings.NORMALIZE_ON_INGEST)

        Raises:
            DimensionError: If dim < 1
        """
        if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
            raise DimensionError(f"Invalid store dimension: {dim!r}", got=None)
        self.dim = dim
        self.normalize_on_ingest = (
            settings.NORMALIZE_ON_INGEST
            if normalize_on_ingest is None
            else normalize_on_ingest
        )
        self._ids: list[str] = []
        self._index: dict[str, int] = {}
        self._rows: list[np.ndarray] = []
        self._meta: dict[str, ChunkMetadata] = {}
        self._frozen = False
        self._lock = threading.Lock()
        self._matrix: np.ndarray | None = None
        self._unit: np.ndarray | None = None
        self._id_rank: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self._ids)

    def __contains__(self, chunk_id: object) -> bool:
        return chunk_id in self._index

    @property
    def ids(self) -> list[str]:
        """Chunk ids in insertion order."""
        return list(self._ids)

    @property
    def frozen(self) -> bool:
        return self._frozen

    def insert(self, record: ChunkRecord) -> None:
        """Insert a chunk record.

        Args:
            record: Chunk with id, optional title/text and embedding

        Raises:
            StoreFrozenError: If the store was frozen
            DuplicateIdError: If the id is already present
            DimensionError: If the embedding dimension differs from the store's
            ZeroNormError: If the embedding is all zeros
        """
        self.insert_vector(
            record.id,
            record.embedding,
            title=record.title,
            text=record.text,
        )

    def insert_vector(
        self,
        chunk_id: str,
        embedding: Sequence[float] | np.ndarray,
        title: str | None = None,
        text: str | None = None,
        normalize: bool | None = None,
    ) -> None:
        """Insert a raw vector (used by ingestion and binary loading).

        Args:
            chunk_id: Unique chunk identifier
            embedding: Embedding components
            title: Optional title metadata
            text: Optional text metadata
            normalize: Override normalize_on_ingest (False when loading a
                persisted store so values stay bit-identical)
        """
        if self._frozen:
            raise StoreFrozenError("Store is frozen; no further inserts allowed")
        if chunk_id in self._index:
            raise DuplicateIdError(chunk_id)

        vec = as_vector(embedding, dim=self.dim)
        norm = l2_norm(vec)
        do_normalize = self.normalize_on_ingest if normalize is None else normalize
        if do_normalize:
            vec = vec / norm
        row = vec.astype(np.float32)
        # float32 rounding can underflow tiny vectors
        l2_norm(row.astype(np.float64))

        self._index[chunk_id] = len(self._ids)
        self._ids.append(chunk_id)
        self._rows.append(row)
        if title is not None or text is not None:
            self._meta[chunk_id] = ChunkMetadata(id=chunk_id, title=title, text=text)
        self._matrix = None

    def freeze(self) -> "VectorStore":
        """Mark ingestion complete and build the search cache."""
        self._build_cache()
        self._frozen = True
        logger.debug(f"Store frozen with {len(self)} records (dim={self.dim})")
        return self

    def get_embedding(self, chunk_id: str) -> np.ndarray:
        """Stored embedding of a chunk as a float64 copy.

        Raises:
            UnknownChunkError: If the id is not in the store
        """
        idx = self._index.get(chunk_id)
        if idx is None:
            raise UnknownChunkError(chunk_id)
        return self._rows[idx].astype(np.float64)

    def get_metadata(self, chunk_id: str) -> ChunkMetadata | None:
        """Title/text metadata of a chunk, if any was ingested."""
        if chunk_id not in self._index:
            raise UnknownChunkError(chunk_id)
        return self._meta.get(chunk_id)

    def attach_metadata(self, meta: ChunkMetadata) -> None:
        """Attach title/text to an existing chunk (sidecar loading).

        Raises:
            UnknownChunkError: If the chunk id is not in the store
        """
        if meta.id not in self._index:
            raise UnknownChunkError(meta.id)
        self._meta[meta.id] = meta

    def float32_rows(self) -> np.ndarray:
        """Stored embeddings as an (n, d) float32 array, insertion order."""
        if not self._rows:
            return np.empty((0, self.dim), dtype=np.float32)
        return np.stack(self._rows)

    def records(self) -> Iterator[ChunkRecord]:
        """Iterate stored chunks as ChunkRecords (insertion order)."""
        for chunk_id, row in zip(self._ids, self._rows, strict=True):
            meta = self._meta.get(chunk_id)
            yield ChunkRecord(
                id=chunk_id,
                title=meta.title if meta else None,
                text=meta.text if meta else None,
                embedding=row.astype(np.float64).tolist(),
            )

    def top_k(self, query: Sequence[float] | np.ndarray, k: int) -> list[ScoredHit]:
        """Exact cosine top-K.

        Hits are sorted by score descending, ties broken by ascending chunk id.

        Args:
            query: Query embedding
            k: Number of hits (>= 1); capped at the store size

        Returns:
            min(k, len(store)) hits

        Raises:
            EmptyStoreError: If the store has no records
            DimensionError: If the query dimension differs
        """
        return self.top_k_batch([query], k)[0]

    def top_k_batch(
        self, queries: Sequence[Sequence[float] | np.ndarray], k: int
    ) -> list[list[ScoredHit]]:
        """Top-K for several queries, scored with one matrix product."""
        if len(queries) == 0:
            self._check_search(k)
            return []
        block = np.stack([as_vector(v, dim=self.dim) for v in queries])
        indices, scores = self.search(block, k)
        return [
            [
                ScoredHit(chunk_id=self._ids[i], score=float(s))
                for i, s in zip(row_idx, row_scores, strict=True)
            ]
            for row_idx, row_scores in zip(indices, scores, strict=True)
        ]

    def search(self, queries: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
        """Top-K row indices and scores for a (b, d) block of queries.

        Queries are trusted finite float64 rows of the store dimension; only
        their norms are checked. Each result row is ordered by score
        descending, then chunk id ascending.

        Args:
            queries: (b, d) float64 query block
            k: Hits per query (>= 1); capped at the store size

        Returns:
            (indices, scores), both shaped (b, min(k, len(store)))

        Raises:
            ConfigError: If k is not a positive integer
            EmptyStoreError: If the store has no records
            ZeroNormError: If a query row is all zeros
        """
        self._check_search(k)
        unit, id_rank = self._build_cache()
        norms = np.sqrt(np.einsum("ij,ij->i", queries, queries))
        if not np.all(norms > 0.0):
            raise ZeroNormError("Zero-norm query: cosine similarity is undefined")
        scores = (queries / norms[:, None]) @ unit.T

        n = scores.shape[1]
        if k >= n:
            top = np.broadcast_to(np.arange(n), scores.shape)
        else:
            top = np.argpartition(scores, n - k, axis=1)[:, n - k :]
            kth = np.take_along_axis(scores, top, axis=1).min(axis=1)
            tied = np.count_nonzero(scores >= kth[:, None], axis=1) > k
            for row in np.flatnonzero(tied):
                # more chunks share the K-th score than fit: lowest ids win
                cand = np.flatnonzero(scores[row] >= kth[row])
                order = np.lexsort((id_rank[cand], -scores[row, cand]))
                top[row] = cand[order[:k]]

        top_scores = np.take_along_axis(scores, top, axis=1)
        order = np.lexsort((id_rank[top], -top_scores), axis=-1)
        return (
            np.take_along_axis(top, order, axis=1),
            np.take_along_axis(top_scores, order, axis=1),
        )

    def rows_at(self, indices: np.ndarray) -> np.ndarray:
        """Stored embeddings (float64) at the given row indices."""
        return self._embeddings()[indices]

    def chunk_id(self, index: int) -> str:
        """Chunk id stored at a row index."""
        return self._ids[index]

    def _check_search(self, k: int) -> None:
        if isinstance(k, bool) or not isinstance(k, int) or k < 1:
            raise ConfigError(f"k must be a positive integer, got {k!r}")
        if not self._ids:
            raise EmptyStoreError("Cannot retrieve from an empty store")

    def _embeddings(self) -> np.ndarray:
        self._build_cache()
        assert self._matrix is not None
        return self._matrix

    def _build_cache(self) -> tuple[np.ndarray, np.ndarray]:
        with self._lock:
            if self._matrix is None:
                matrix = self.float32_rows().astype(np.float64)
                norms = np.sqrt(np.einsum("ij,ij->i", matrix, matrix))
                rank = np.empty(len(self._ids), dtype=np.int64)
                rank[np.argsort(np.array(self._ids, dtype=object), kind="stable")] = (
                    np.arange(len(self._ids))
                )
                self._unit = matrix / norms[:, None]
                self._id_rank = rank
                self._matrix = matrix
            assert self._unit is not None and self._id_rank is not None
            return self._unit, self._id_rank


def create_store(d: int, normalize_on_ingest: bool | None = None) -> VectorStore:
    """Create an empty store of fixed dimension d.

    Raises:
        DimensionError: If d < 1
    """
    return VectorStore(d, normalize_on_ingest=normalize_on_ingest)
