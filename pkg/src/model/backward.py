"""Analytic gradients of next_query w.r.t. parameters and inputs."""

import math

import numpy as np

from src.exceptions import DimensionError, NumericError
from src.model.forward import RESIDUAL_COEFFICIENTS, ForwardTrace
from src.model.params import ModelParams, ParamGrads


def backward(
    params: ModelParams, trace: ForwardTrace, upstream_grad: np.ndarray
) -> tuple[ParamGrads, np.ndarray, np.ndarray]:
    """Backpropagate dL/d(next_q) through the residual and the update gate.

    Args:
        params: Parameters used for the forward call that produced trace
        trace: Forward trace (dropout mask included when training)
        upstream_grad: dL/d(next_q), a d-vector

    Returns:
        (parameter gradients, dL/dq, dL/dc)

    Raises:
        DimensionError: If upstream_grad is not a d-vector
        NumericError: If any gradient is NaN or Inf
    """
    u = np.asarray(upstream_grad, dtype=np.float64)
    if u.shape != (params.d,):
        raise DimensionError(
            f"upstream_grad has shape {u.shape}, expected ({params.d},)",
            expected=params.d,
        )
    a_q, a_c, a_g = RESIDUAL_COEFFICIENTS[params.variant]
    scale = 1.0 / math.sqrt(params.d)

    d_gate = a_g * u
    if trace.dropout_mask is not None:
        d_gate = d_gate * trace.dropout_mask

    # gate_out = w * v
    d_weights = d_gate * trace.v_proj
    d_v = d_gate * trace.attn_weights
    # softmax Jacobian (diag(w) - w w^T) applied to d_weights
    w = trace.attn_weights
    d_logits = w * (d_weights - np.dot(w, d_weights))
    d_qp = d_logits * trace.k_proj * scale
    d_kp = d_logits * trace.q_proj * scale

    grads = ParamGrads(
        w_q=np.outer(d_qp, trace.q),
        b_q=d_qp,
        w_k=np.outer(d_kp, trace.c),
        b_k=d_kp,
        w_v=np.outer(d_v, trace.c),
        b_v=d_v,
    )
    grad_q = a_q * u + params.w_q.T @ d_qp
    grad_c = a_c * u + params.w_k.T @ d_kp + params.w_v.T @ d_v

    grads.check_finite()
    if not (np.all(np.isfinite(grad_q)) and np.all(np.isfinite(grad_c))):
        raise NumericError("Non-finite input gradient")
    return grads, grad_q, grad_c
