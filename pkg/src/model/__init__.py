"""TreeHop network: parameters, forward, backward and checkpoints."""

from src.model.backward import backward
from src.model.checkpoint import load_params, save_params
from src.model.forward import (
    ForwardMode,
    ForwardTrace,
    next_query,
    next_query_batch,
    update_gate,
)
from src.model.params import ModelParams, ParamGrads, init_params, zero_params

__all__ = [
    "ForwardMode",
    "ForwardTrace",
    "ModelParams",
    "ParamGrads",
    "backward",
    "init_params",
    "load_params",
    "next_query",
    "next_query_batch",
    "save_params",
    "update_gate",
    "zero_params",
]
