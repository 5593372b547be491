"""Binary store format and JSONL ingestion.

Binary layout (little-endian):

    "THS1" | u32 dim | u64 count | count x (u32 id_len | id utf-8 | dim x f32)

Titles and texts live in a sidecar JSONL (``<path>.meta.jsonl``) keyed by id.
"""

import logging
import struct
from pathlib import Path

import numpy as np

from src.exceptions import DataError, FormatError
from src.models.chunk import ChunkMetadata, ChunkRecord
from src.store.vector_store import VectorStore
from src.utils.jsonl import iter_jsonl, write_jsonl

logger = logging.getLogger(__name__)

STORE_MAGIC = b"THS1"
_HEADER = struct.Struct("<4sIQ")
_U32 = struct.Struct("<I")


def sidecar_path(path: str | Path) -> Path:
    """Metadata sidecar location for a binary store path."""
    path = Path(path)
    return path.with_name(path.name + ".meta.jsonl")


def save_store(store: VectorStore, path: str | Path) -> Path:
    """Persist a store to the binary format plus metadata sidecar.

    Args:
        store: Store to persist
        path: Destination file

    Returns:
        Path of the written binary file
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    rows = store.float32_rows().astype("<f4", copy=False)

    with open(path, "wb") as f:
        f.write(_HEADER.pack(STORE_MAGIC, store.dim, len(store)))
        for chunk_id, row in zip(store.ids, rows, strict=True):
            raw_id = chunk_id.encode("utf-8")
            f.write(_U32.pack(len(raw_id)))
            f.write(raw_id)
            f.write(row.tobytes())

    metas = [m for m in (store.get_metadata(i) for i in store.ids) if m is not None]
    side = sidecar_path(path)
    if metas:
        write_jsonl(side, metas)
    elif side.exists():
        side.unlink()

    logger.info(f"Saved store ({len(store)} records, dim={store.dim}) to {path}")
    return path


def load_store(path: str | Path) -> VectorStore:
    """Load a store written by save_store.

    Embeddings are loaded bit-identically (no re-normalization). The returned
    store is frozen.

    Raises:
        FileNotFoundError: If the file doesn't exist
        FormatError: On bad magic, truncated data or trailing bytes
    """
    path = Path(path)
    data = path.read_bytes()

    if len(data) < _HEADER.size:
        raise FormatError(f"Truncated store header in {path}", offset=len(data))
    magic, dim, count = _HEADER.unpack_from(data, 0)
    if magic != STORE_MAGIC:
        raise FormatError(f"Bad magic bytes {magic!r} in {path}", offset=0)
    if dim == 0:
        raise FormatError(f"Store {path} declares dimension 0", offset=4)

    store = VectorStore(dim, normalize_on_ingest=False)
    vec_bytes = 4 * dim
    offset = _HEADER.size
    for i in range(count):
        if offset + _U32.size > len(data):
            raise FormatError(f"Truncated record {i} (id length)", offset=offset)
        (id_len,) = _U32.unpack_from(data, offset)
        id_start = offset + _U32.size
        vec_start = id_start + id_len
        if vec_start + vec_bytes > len(data):
            raise FormatError(
                f"Truncated record {i}: need {id_len} id bytes and {vec_bytes} "
                "embedding bytes",
                offset=offset,
            )
        try:
            chunk_id = data[id_start:vec_start].decode("utf-8")
        except UnicodeDecodeError as e:
            raise FormatError(f"Record {i} id is not UTF-8", offset=id_start) from e
        vec = np.frombuffer(data, dtype="<f4", count=dim, offset=vec_start)
        try:
            store.insert_vector(chunk_id, vec, normalize=False)
        except DataError as e:
            raise FormatError(f"Record {i}: {e}", offset=offset) from e
        offset = vec_start + vec_bytes

    if offset != len(data):
        raise FormatError(
            f"{len(data) - offset} trailing bytes after {count} records "
            "(declared dimension or count does not match payload)",
            offset=offset,
        )

    side = sidecar_path(path)
    if side.exists():
        for meta in iter_jsonl(side, ChunkMetadata):
            store.attach_metadata(meta)

    logger.info(f"Loaded store ({len(store)} records, dim={dim}) from {path}")
    return store.freeze()


def ingest_jsonl(
    path: str | Path,
    dim: int | None = None,
    normalize_on_ingest: bool | None = None,
) -> VectorStore:
    """Build a store from a chunk JSONL file.

    Each line is {"id", "title"?, "text"?, "embedding": [...]}. The first line
    fixes the dimension when dim is not given. Any bad line aborts ingestion.

    Args:
        path: JSONL file
        dim: Expected dimension
        normalize_on_ingest: Override settings.NORMALIZE_ON_INGEST

    Returns:
        Frozen store

    Raises:
        FormatError: With the 1-based line number of the first bad line
    """
    store: VectorStore | None = None
    line_no = 0
    with open(path, "rb") as f:
        for line_no, raw in enumerate(f, start=1):
            if not raw.strip():
                continue
            try:
                record = ChunkRecord.model_validate_json(raw.decode("utf-8"))
                if store is None:
                    store = VectorStore(
                        dim or len(record.embedding),
                        normalize_on_ingest=normalize_on_ingest,
                    )
                store.insert(record)
            except FormatError:
                raise
            except (DataError, ValueError) as e:
                raise FormatError(f"Cannot ingest {path}: {e}", line=line_no) from e

    if store is None:
        raise FormatError(f"No records in {path}", line=line_no)
    logger.info(f"Ingested {len(store)} chunks (dim={store.dim}) from {path}")
    return store.freeze()


def ingest_records(
    records: list[ChunkRecord],
    dim: int | None = None,
    normalize_on_ingest: bool | None = None,
) -> VectorStore:
    """Build a frozen store from in-memory records (e.g. a synthetic corpus)."""
    if not records:
        raise FormatError("No records to ingest")
    store = VectorStore(
        dim or len(records[0].embedding), normalize_on_ingest=normalize_on_ingest
    )
    for record in records:
        store.insert(record)
    return store.freeze()