"""Finite-difference verification of the analytic gradients.

Two checks are available: the model alone under a random linear projection
L = u . next_query(q, c), and the full contrastive example loss
(next_query -> cosine -> InfoNCE). Both compare every parameter entry and
every component of q and c against central differences.
"""

import logging
from collections.abc import Callable
from enum import Enum

import numpy as np
from pydantic import BaseModel, Field

from src.model.backward import backward
from src.model.forward import ForwardMode, next_query
from src.model.params import ModelParams, init_params
from src.models.training import ModelVariant
from src.training.loss import contrastive_loss

logger = logging.getLogger(__name__)

RELATIVE_ERROR_FLOOR = 1e-2


class GradCheckMode(str, Enum):
    MODEL = "model"
    EXAMPLE = "example"
    BOTH = "both"


class GradCheckResult(BaseModel):
    """Outcome of a gradient check run."""

    dims: list[int]
    trials: int
    mode: GradCheckMode
    variant: ModelVariant
    step: float
    tolerance: float
    max_rel_error: float
    error_floor: float = Field(
        default=RELATIVE_ERROR_FLOOR,
        description="Denominator floor: below it the error is absolute",
    )
    worst_parameter: str | None = None
    values_checked: int
    passed: bool


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> np.ndarray:
    """|a - n| / max(|a|, |n|, floor), elementwise."""
    denom = np.maximum(
        np.maximum(np.abs(analytic), np.abs(numeric)), RELATIVE_ERROR_FLOOR
    )
    return np.abs(analytic - numeric) / denom


def numeric_gradient(f: Callable[[], float], x: np.ndarray, h: float) -> np.ndarray:
    """Central differences of f with respect to x, perturbing x in place."""
    grad = np.zeros_like(x)
    for idx in np.ndindex(x.shape):
        orig = x[idx]
        x[idx] = orig + h
        f_plus = f()
        x[idx] = orig - h
        f_minus = f()
        x[idx] = orig
        grad[idx] = (f_plus - f_minus) / (2.0 * h)
    return grad


def random_instance(
    d: int, rng: np.random.Generator, variant: ModelVariant, dropout_rate: float
) -> tuple[ModelParams, np.ndarray, np.ndarray]:
    """Random params (non-zero biases) and unit-norm q, c."""
    params = init_params(
        d, int(rng.integers(2**31)), dropout_rate=dropout_rate, variant=variant
    )
    for name in ("b_q", "b_k", "b_v"):
        getattr(params, name)[:] = rng.normal(0.0, 0.1, size=d)
    q = rng.normal(size=d)
    c = rng.normal(size=d)
    return params, q / np.linalg.norm(q), c / np.linalg.norm(c)


def _compare(
    f: Callable[[], float],
    analytic: dict[str, np.ndarray],
    live: dict[str, np.ndarray],
    h: float,
) -> tuple[float, str, int]:
    worst, worst_name, count = 0.0, "", 0
    for name, arr in live.items():
        numeric = numeric_gradient(f, arr, h)
        err = float(np.max(relative_error(analytic[name], numeric)))
        count += arr.size
        if err >= worst:
            worst, worst_name = err, name
    return worst, worst_name, count


def check_model_instance(
    d: int,
    rng: np.random.Generator,
    h: float = 1e-4,
    variant: ModelVariant = ModelVariant.FULL,
) -> tuple[float, str, int]:
    """Check backward() on one random instance under a linear projection.

    Returns:
        (max relative error, name of the worst tensor, values checked)
    """
    params, q, c = random_instance(d, rng, variant, dropout_rate=0.0)
    projection = rng.normal(size=d)

    def f() -> float:
        out, _ = next_query(params, q, c)
        return float(np.dot(projection, out))

    _, trace = next_query(params, q, c)
    grads, grad_q, grad_c = backward(params, trace, projection)
    analytic = {**grads.tensors(), "q": grad_q, "c": grad_c}
    return _compare(f, analytic, {**params.tensors(), "q": q, "c": c}, h)


def check_example_instance(
    d: int,
    rng: np.random.Generator,
    h: float = 1e-4,
    variant: ModelVariant = ModelVariant.FULL,
    temperature: float = 0.15,
    num_negatives: int = 5,
    dropout_rate: float = 0.1,
) -> tuple[float, str, int]:
    """Check the contrastive example loss end to end on one random instance.

    The dropout generator is re-seeded for every evaluation so the mask is
    the same in the analytic pass and every finite-difference pass.
    """
    params, q, c = random_instance(d, rng, variant, dropout_rate=dropout_rate)
    positive = rng.normal(size=d)
    negatives = rng.normal(size=(num_negatives, d))
    mask_seed = int(rng.integers(2**31))

    def evaluate() -> tuple[float, dict[str, np.ndarray]]:
        loss, grads, grad_q, grad_c = contrastive_loss(
            params,
            q,
            c,
            positive,
            negatives,
            temperature,
            mode=ForwardMode.TRAINING,
            rng=np.random.default_rng(mask_seed),
        )
        return loss, {**grads.tensors(), "q": grad_q, "c": grad_c}

    _, analytic = evaluate()
    return _compare(
        lambda: evaluate()[0], analytic, {**params.tensors(), "q": q, "c": c}, h
    )


def run_gradcheck(
    dims: list[int] | tuple[int, ...] = (2, 4, 8),
    trials: int = 100,
    seed: int = 42,
    h: float = 1e-4,
    tolerance: float = 1e-4,
    mode: GradCheckMode | str = GradCheckMode.BOTH,
    variant: ModelVariant = ModelVariant.FULL,
) -> GradCheckResult:
    """Run `trials` random instances, cycling through dims.

    Args:
        dims: Dimensions to test; trial i uses dims[i % len(dims)]
        trials: Number of random instances
        seed: Seed for all random draws
        h: Finite-difference step
        tolerance: Pass threshold on the maximum relative error
        mode: MODEL, EXAMPLE or BOTH (each trial runs both checks)
        variant: Model variant under test

    Returns:
        GradCheckResult with the maximum relative error over all values
    """
    mode = GradCheckMode(mode)
    rng = np.random.default_rng(seed)
    worst, worst_name, checked = 0.0, None, 0
    for trial in range(trials):
        d = dims[trial % len(dims)]
        checks = []
        if mode in (GradCheckMode.MODEL, GradCheckMode.BOTH):
            checks.append(("model", check_model_instance(d, rng, h, variant)))
        if mode in (GradCheckMode.EXAMPLE, GradCheckMode.BOTH):
            checks.append(("example", check_example_instance(d, rng, h, variant)))
        for label, (err, name, count) in checks:
            checked += count
            if err >= worst:
                worst, worst_name = err, f"{label}:{name} (d={d}, trial {trial})"

    result = GradCheckResult(
        dims=list(dims),
        trials=trials,
        mode=mode,
        variant=variant,
        step=h,
        tolerance=tolerance,
        max_rel_error=worst,
        worst_parameter=worst_name,
        values_checked=checked,
        passed=worst < tolerance,
    )
    logger.info(
        f"Gradient check: max relative error {worst:.3e} over {checked} values "
        f"({'pass' if result.passed else 'FAIL'})"
    )
    return result
