"""AdamW with decoupled weight decay over named numpy arrays."""

from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np

from src.exceptions import DimensionError, NumericError
from src.models.training import TrainConfig


@dataclass
class AdamWState:
    """First/second moment estimates and the step counter."""

    step: int = 0
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)


def _as_mapping(tensors: object) -> Mapping[str, np.ndarray]:
    if hasattr(tensors, "tensors"):
        return tensors.tensors()  # type: ignore[union-attr]
    return tensors  # type: ignore[return-value]


def adamw_step(
    params: object,
    grads: object,
    state: AdamWState,
    config: TrainConfig,
) -> AdamWState:
    """Apply one AdamW update in place.

    m = b1 m + (1 - b1) g;  v = b2 v + (1 - b2) g^2
    p -= lr * (m_hat / (sqrt(v_hat) + eps) + wd * p)

    Args:
        params: ModelParams or a mapping of name -> array (mutated in place)
        grads: ParamGrads or a mapping with the same names and shapes
        state: Optimizer state (mutated and returned)
        config: lr, betas, eps and weight decay

    Raises:
        NumericError: If any gradient is non-finite (params left untouched)
        DimensionError: If a gradient shape differs from its parameter
    """
    param_map = _as_mapping(params)
    grad_map = _as_mapping(grads)
    for name, p in param_map.items():
        g = grad_map[name]
        if g.shape != p.shape:
            raise DimensionError(
                f"Gradient for {name} has shape {g.shape}, expected {p.shape}"
            )
        if not np.all(np.isfinite(g)):
            raise NumericError(f"Non-finite gradient for {name}; update skipped")

    state.step += 1
    b1, b2 = config.beta1, config.beta2
    correction1 = 1.0 - b1**state.step
    correction2 = 1.0 - b2**state.step
    lr = config.learning_rate

    for name, p in param_map.items():
        g = grad_map[name]
        m = state.m.setdefault(name, np.zeros_like(p))
        v = state.v.setdefault(name, np.zeros_like(p))
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * g * g
        m_hat = m / correction1
        v_hat = v / correction2
        p -= lr * (m_hat / (np.sqrt(v_hat) + config.eps) + config.weight_decay * p)
    return state
