"""TreeHop exceptions and their CLI exit codes."""

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3


class TreeHopError(Exception):
    """Base exception for all TreeHop errors."""

    exit_code: int = EXIT_DATA
    code: str = "TREEHOP_ERROR"


class ConfigError(TreeHopError):
    """Invalid configuration or command-line usage."""

    exit_code = EXIT_USAGE
    code = "CONFIG_ERROR"


class DataError(TreeHopError):
    """Invalid, inconsistent or unresolvable input data."""

    exit_code = EXIT_DATA
    code = "DATA_ERROR"


class DimensionError(DataError):
    """Embedding dimension does not match the store or model dimension."""

    code = "DIMENSION_ERROR"

    def __init__(
        self, message: str, expected: int | None = None, got: int | None = None
    ):
        """Initialize dimension error.

        Args:
            message: Error message
            expected: Dimension the store/model was configured with
            got: Dimension that was supplied
        """
        self.expected = expected
        self.got = got
        super().__init__(message)


class DuplicateIdError(DataError):
    """Chunk id already present in the store."""

    code = "DUPLICATE_ID"

    def __init__(self, chunk_id: str):
        self.chunk_id = chunk_id
        super().__init__(f"Duplicate chunk id: {chunk_id!r}")


class EmptyStoreError(DataError):
    """Retrieval attempted on a store without records."""

    code = "EMPTY_STORE"


class UnknownChunkError(DataError):
    """Chunk id not resolvable in the store."""

    code = "UNKNOWN_CHUNK"

    def __init__(self, chunk_id: str):
        self.chunk_id = chunk_id
        super().__init__(f"Unknown chunk id: {chunk_id!r}")


class InvalidEmbeddingError(DataError):
    """Embedding contains NaN or Inf components."""

    code = "INVALID_EMBEDDING"


class ZeroNormError(DataError):
    """Embedding with zero L2 norm (cosine similarity undefined)."""

    code = "ZERO_NORM"


class StoreFrozenError(DataError):
    """Insert attempted after the store was frozen."""

    code = "STORE_FROZEN"


class FormatError(DataError):
    """Malformed file (binary store, checkpoint or JSONL)."""

    code = "FORMAT_ERROR"

    def __init__(
        self,
        message: str,
        offset: int | None = None,
        line: int | None = None,
    ):
        """Initialize format error.

        Args:
            message: Error message
            offset: Byte offset where decoding failed (binary formats)
            line: 1-based line number where parsing failed (JSONL formats)
        """
        self.offset = offset
        self.line = line
        location = ""
        if offset is not None:
            location = f" (at byte offset {offset})"
        elif line is not None:
            location = f" (at line {line})"
        super().__init__(f"{message}{location}")


class NumericError(TreeHopError):
    """NaN/Inf produced during forward, backward or optimization."""

    exit_code = EXIT_NUMERIC
    code = "NUMERIC_ERROR"
