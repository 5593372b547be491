"""Cosine similarity and vector validation helpers."""

from collections.abc import Sequence

import numpy as np

from src.exceptions import DimensionError, InvalidEmbeddingError, ZeroNormError


def as_vector(
    values: Sequence[float] | np.ndarray, dim: int | None = None
) -> np.ndarray:
    """Convert an embedding to a finite float64 vector.

    Args:
        values: Embedding components
        dim: Expected dimension (checked when given)

    Returns:
        1-D float64 array

    Raises:
        DimensionError: If the shape is not 1-D or the length differs from dim
        InvalidEmbeddingError: If any component is NaN or Inf
    """
    vec = np.asarray(values, dtype=np.float64)
    if vec.ndim != 1:
        raise DimensionError(f"Embedding must be 1-D, got shape {vec.shape}")
    if dim is not None and vec.shape[0] != dim:
        raise DimensionError(
            f"Embedding dimension {vec.shape[0]} does not match expected {dim}",
            expected=dim,
            got=vec.shape[0],
        )
    if not np.all(np.isfinite(vec)):
        raise InvalidEmbeddingError("Embedding contains NaN or Inf components")
    return vec


def l2_norm(vec: np.ndarray) -> float:
    """Euclidean norm, raising on zero vectors."""
    norm = float(np.sqrt(np.dot(vec, vec)))
    if norm == 0.0:
        raise ZeroNormError("Zero-norm embedding: cosine similarity is undefined")
    return norm


def cosine_similarity(
    a: Sequence[float] | np.ndarray, b: Sequence[float] | np.ndarray
) -> float:
    """Cosine similarity dot(a, b) / (|a| |b|).

    Args:
        a: First embedding
        b: Second embedding, same dimension as a

    Returns:
        Similarity in [-1, 1] up to floating-point slack

    Raises:
        DimensionError: If dimensions differ
        ZeroNormError: If either vector is all zeros
    """
    va = as_vector(a)
    vb = as_vector(b, dim=va.shape[0])
    return float(np.dot(va, vb) / (l2_norm(va) * l2_norm(vb)))
