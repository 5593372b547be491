"""TreeHop parameters: the Q/K/V affine maps of the update gate."""

import math
from dataclasses import dataclass

import numpy as np

from src.exceptions import ConfigError, DimensionError, NumericError
from src.models.training import ModelVariant

# Order used everywhere parameters are enumerated (checkpoints, optimizer state)
PARAM_NAMES = ("w_q", "b_q", "w_k", "b_k", "w_v", "b_v")


@dataclass
class ModelParams:
    """Weights and biases of Q_u, K_u and V_u plus dropout rate.

    Arrays are float64; training mutates them in place through tensors().
    """

    d: int
    w_q: np.ndarray
    b_q: np.ndarray
    w_k: np.ndarray
    b_k: np.ndarray
    w_v: np.ndarray
    b_v: np.ndarray
    dropout_rate: float = 0.1
    variant: ModelVariant = ModelVariant.FULL

    def __post_init__(self) -> None:
        if self.d < 1:
            raise DimensionError(f"Invalid model dimension: {self.d}")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ConfigError(
                f"dropout_rate must be in [0, 1), got {self.dropout_rate}"
            )
        for name in PARAM_NAMES:
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            expected = (self.d, self.d) if name.startswith("w_") else (self.d,)
            if arr.shape != expected:
                raise DimensionError(
                    f"{name} has shape {arr.shape}, expected {expected}",
                    expected=self.d,
                )
            if not np.all(np.isfinite(arr)):
                raise NumericError(f"{name} contains NaN or Inf")
            setattr(self, name, arr)
        self.variant = ModelVariant(self.variant)

    def tensors(self) -> dict[str, np.ndarray]:
        """Parameter arrays by name (live references, not copies)."""
        return {name: getattr(self, name) for name in PARAM_NAMES}

    def copy(self) -> "ModelParams":
        return ModelParams(
            d=self.d,
            **{name: arr.copy() for name, arr in self.tensors().items()},
            dropout_rate=self.dropout_rate,
            variant=self.variant,
        )

    def parameter_count(self) -> int:
        return 3 * self.d * self.d + 3 * self.d

    def equals(self, other: "ModelParams") -> bool:
        """Bitwise equality of every array and hyperparameter."""
        return (
            self.d == other.d
            and self.dropout_rate == other.dropout_rate
            and self.variant == other.variant
            and all(
                np.array_equal(a, b)
                for a, b in zip(
                    self.tensors().values(), other.tensors().values(), strict=True
                )
            )
        )


@dataclass
class ParamGrads:
    """Gradients with the same layout as ModelParams."""

    w_q: np.ndarray
    b_q: np.ndarray
    w_k: np.ndarray
    b_k: np.ndarray
    w_v: np.ndarray
    b_v: np.ndarray

    @classmethod
    def zeros(cls, d: int) -> "ParamGrads":
        return cls(
            **{
                name: np.zeros((d, d) if name.startswith("w_") else (d,))
                for name in PARAM_NAMES
            }
        )

    def tensors(self) -> dict[str, np.ndarray]:
        return {name: getattr(self, name) for name in PARAM_NAMES}

    def add_(self, other: "ParamGrads") -> "ParamGrads":
        """Accumulate other into self."""
        for name in PARAM_NAMES:
            getattr(self, name).__iadd__(getattr(other, name))
        return self

    def scale_(self, factor: float) -> "ParamGrads":
        for name in PARAM_NAMES:
            getattr(self, name).__imul__(factor)
        return self

    def max_abs(self) -> float:
        return max(float(np.max(np.abs(g))) for g in self.tensors().values())

    def check_finite(self) -> None:
        """Raise NumericError if any gradient is NaN or Inf."""
        for name, g in self.tensors().items():
            if not np.all(np.isfinite(g)):
                raise NumericError(f"Non-finite gradient in {name}")


def glorot_bound(d: int) -> float:
    """Uniform Glorot bound sqrt(6 / (fan_in + fan_out)) for a d x d map."""
    return math.sqrt(6.0 / (2 * d))


def init_params(
    d: int,
    seed: int,
    dropout_rate: float = 0.1,
    variant: ModelVariant = ModelVariant.FULL,
) -> ModelParams:
    """Glorot-uniform weights, zero biases, deterministic given seed.

    Args:
        d: Embedding dimension
        seed: RNG seed
        dropout_rate: Dropout applied to the gate output during training
        variant: Residual structure (FULL unless running an ablation)

    Raises:
        DimensionError: If d < 1
    """
    if d < 1:
        raise DimensionError(f"Invalid model dimension: {d}")
    rng = np.random.default_rng(seed)
    bound = glorot_bound(d)
    w_q = rng.uniform(-bound, bound, size=(d, d))
    w_k = rng.uniform(-bound, bound, size=(d, d))
    w_v = rng.uniform(-bound, bound, size=(d, d))
    return ModelParams(
        d=d,
        w_q=w_q,
        b_q=np.zeros(d),
        w_k=w_k,
        b_k=np.zeros(d),
        w_v=w_v,
        b_v=np.zeros(d),
        dropout_rate=dropout_rate,
        variant=variant,
    )


def zero_params(
    d: int,
    dropout_rate: float = 0.0,
    variant: ModelVariant = ModelVariant.FULL,
) -> ModelParams:
    """All-zero parameters: the untrained controller where next query = q - c."""
    if d < 1:
        raise DimensionError(f"Invalid model dimension: {d}")
    return ModelParams(
        d=d,
        **{
            name: np.zeros((d, d) if name.startswith("w_") else (d,))
            for name in PARAM_NAMES
        },
        dropout_rate=dropout_rate,
        variant=variant,
    )
