"""Contrastive training of the TreeHop update gate."""

from src.training.loss import contrastive_loss, example_loss, info_nce_loss
from src.training.negatives import sample_negatives
from src.training.optimizer import AdamWState, adamw_step
from src.training.trainer import train

__all__ = [
    "AdamWState",
    "adamw_step",
    "contrastive_loss",
    "example_loss",
    "info_nce_loss",
    "sample_negatives",
    "train",
]
