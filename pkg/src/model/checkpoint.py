"""Binary checkpoint format for ModelParams.

Layout (little-endian): "THM1" | u32 version | u32 dim | f32 dropout_rate
[| u32 variant (version 2 only)] | W_Q b_Q W_K b_K W_V b_V as f32 row-major.
Version 1 is written for the full model; ablation variants need version 2.
"""

import logging
import struct
from pathlib import Path

import numpy as np

from src.exceptions import DimensionError, FormatError
from src.model.params import PARAM_NAMES, ModelParams
from src.models.training import ModelVariant

logger = logging.getLogger(__name__)

MODEL_MAGIC = b"THM1"
_HEADER = struct.Struct("<4sIIf")
_U32 = struct.Struct("<I")

VARIANT_CODES: dict[ModelVariant, int] = {
    ModelVariant.FULL: 0,
    ModelVariant.WITHOUT_CHUNK: 1,
    ModelVariant.WITHOUT_QUERY: 2,
    ModelVariant.WITHOUT_GATE: 3,
}
_CODE_TO_VARIANT = {code: variant for variant, code in VARIANT_CODES.items()}


def save_params(params: ModelParams, path: str | Path) -> Path:
    """Write a checkpoint. Values are stored as float32."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    version = 1 if params.variant is ModelVariant.FULL else 2

    with open(path, "wb") as f:
        f.write(_HEADER.pack(MODEL_MAGIC, version, params.d, params.dropout_rate))
        if version == 2:
            f.write(_U32.pack(VARIANT_CODES[params.variant]))
        for name in PARAM_NAMES:
            f.write(getattr(params, name).astype("<f4").tobytes())

    logger.info(f"Saved checkpoint (d={params.d}, {params.variant.value}) to {path}")
    return path


def load_params(path: str | Path, expected_dim: int | None = None) -> ModelParams:
    """Read a checkpoint written by save_params.

    Args:
        path: Checkpoint file
        expected_dim: Dimension the caller will run with (checked when given)

    Raises:
        FileNotFoundError: If the file doesn't exist
        FormatError: On bad magic, unknown version, truncation or trailing bytes
        DimensionError: If the checkpoint dimension differs from expected_dim
    """
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise FormatError(f"Truncated checkpoint header in {path}", offset=len(data))
    magic, version, d, dropout = _HEADER.unpack_from(data, 0)
    if magic != MODEL_MAGIC:
        raise FormatError(f"Bad magic bytes {magic!r} in {path}", offset=0)
    if version not in (1, 2):
        raise FormatError(f"Unsupported checkpoint version {version}", offset=4)
    if d == 0:
        raise FormatError("Checkpoint declares dimension 0", offset=8)
    if not 0.0 <= dropout < 1.0:
        raise FormatError(f"Invalid dropout rate {dropout} in {path}", offset=12)

    offset = _HEADER.size
    variant = ModelVariant.FULL
    if version == 2:
        if offset + _U32.size > len(data):
            raise FormatError("Truncated variant code", offset=offset)
        (code,) = _U32.unpack_from(data, offset)
        if code not in _CODE_TO_VARIANT:
            raise FormatError(f"Unknown model variant code {code}", offset=offset)
        variant = _CODE_TO_VARIANT[code]
        offset += _U32.size

    arrays: dict[str, np.ndarray] = {}
    for name in PARAM_NAMES:
        shape = (d, d) if name.startswith("w_") else (d,)
        count = int(np.prod(shape))
        if offset + 4 * count > len(data):
            raise FormatError(
                f"Truncated checkpoint while reading {name}", offset=offset
            )
        arrays[name] = (
            np.frombuffer(data, dtype="<f4", count=count, offset=offset)
            .reshape(shape)
            .astype(np.float64)
        )
        if not np.all(np.isfinite(arrays[name])):
            raise FormatError(f"Non-finite values in {name} of {path}", offset=offset)
        offset += 4 * count
    if offset != len(data):
        raise FormatError(f"{len(data) - offset} trailing bytes", offset=offset)

    if expected_dim is not None and d != expected_dim:
        raise DimensionError(
            f"Checkpoint dimension {d} does not match expected {expected_dim}",
            expected=expected_dim,
            got=d,
        )
    return ModelParams(
        d=d, **arrays, dropout_rate=float(dropout), variant=variant
    )
