"""Forward pass: update gate (cross-attention) and next-query residual."""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from src.exceptions import ConfigError
from src.model.params import ModelParams
from src.models.training import ModelVariant
from src.store.similarity import as_vector


class ForwardMode(str, Enum):
    """Inference is deterministic; training applies inverted dropout."""

    INFERENCE = "inference"
    TRAINING = "training"


# (coefficient of q, coefficient of c, coefficient of the gate output)
RESIDUAL_COEFFICIENTS: dict[ModelVariant, tuple[float, float, float]] = {
    ModelVariant.FULL: (1.0, -1.0, 1.0),
    ModelVariant.WITHOUT_CHUNK: (1.0, 0.0, 1.0),
    ModelVariant.WITHOUT_QUERY: (0.0, -1.0, 1.0),
    ModelVariant.WITHOUT_GATE: (1.0, -1.0, 0.0),
}


@dataclass
class ForwardTrace:
    """Intermediate values of one forward pass, kept for backward()."""

    q: np.ndarray
    c: np.ndarray
    q_proj: np.ndarray
    k_proj: np.ndarray
    v_proj: np.ndarray
    attn_logits: np.ndarray
    attn_weights: np.ndarray
    gate_out: np.ndarray
    next_q: np.ndarray | None = None
    dropout_mask: np.ndarray | None = None


def softmax(z: np.ndarray) -> np.ndarray:
    """Max-shifted softmax over the components of a vector."""
    shifted = np.exp(z - np.max(z))
    return shifted / np.sum(shifted)


def update_gate(
    params: ModelParams, q: np.ndarray, c: np.ndarray
) -> tuple[np.ndarray, ForwardTrace]:
    """softmax((W_Q q + b_Q) * (W_K c + b_K) / sqrt(d)) * (W_V c + b_V).

    Products are componentwise and the softmax runs over the d components.

    Raises:
        DimensionError: If q or c does not have params.d components
    """
    q = as_vector(q, dim=params.d)
    c = as_vector(c, dim=params.d)
    q_proj = params.w_q @ q + params.b_q
    k_proj = params.w_k @ c + params.b_k
    v_proj = params.w_v @ c + params.b_v
    attn_logits = q_proj * k_proj / math.sqrt(params.d)
    attn_weights = softmax(attn_logits)
    gate_out = attn_weights * v_proj
    return gate_out, ForwardTrace(
        q=q,
        c=c,
        q_proj=q_proj,
        k_proj=k_proj,
        v_proj=v_proj,
        attn_logits=attn_logits,
        attn_weights=attn_weights,
        gate_out=gate_out,
    )


def next_query(
    params: ModelParams,
    q: np.ndarray,
    c: np.ndarray,
    mode: ForwardMode | str = ForwardMode.INFERENCE,
    rng: np.random.Generator | None = None,
) -> tuple[np.ndarray, ForwardTrace]:
    """Next-hop query embedding q - c + UpdateGate(q, c).

    Args:
        params: Model parameters
        q: Current query embedding
        c: Retrieved chunk embedding
        mode: INFERENCE (deterministic) or TRAINING (inverted dropout on the
            gate output before the residual addition)
        rng: Seeded generator, required in TRAINING mode

    Returns:
        (next query embedding, forward trace)

    Raises:
        ConfigError: If TRAINING mode is requested without an rng
        DimensionError: On dimension mismatch
    """
    mode = ForwardMode(mode)
    gate_out, trace = update_gate(params, q, c)

    gated = gate_out
    if mode is ForwardMode.TRAINING:
        if rng is None:
            raise ConfigError("Training-mode forward requires a seeded rng")
        p = params.dropout_rate
        if p > 0.0:
            keep = rng.random(params.d) >= p
            trace.dropout_mask = keep.astype(np.float64) / (1.0 - p)
            gated = gate_out * trace.dropout_mask

    a_q, a_c, a_g = RESIDUAL_COEFFICIENTS[params.variant]
    result = a_q * trace.q + a_c * trace.c + a_g * gated
    trace.next_q = result
    return result, trace


def next_query_batch(
    params: ModelParams, queries: np.ndarray, chunks: np.ndarray
) -> np.ndarray:
    """Inference-mode next_query for stacked (b, d) query and chunk rows.

    Rows are trusted float64 arrays of dimension params.d; no trace is kept.
    """
    q_proj = queries @ params.w_q.T + params.b_q
    k_proj = chunks @ params.w_k.T + params.b_k
    v_proj = chunks @ params.w_v.T + params.b_v
    logits = q_proj * k_proj / math.sqrt(params.d)
    weights = np.exp(logits - logits.max(axis=1, keepdims=True))
    weights /= weights.sum(axis=1, keepdims=True)
    a_q, a_c, a_g = RESIDUAL_COEFFICIENTS[params.variant]
    return a_q * queries + a_c * chunks + a_g * (weights * v_proj)
