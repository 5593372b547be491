"""Multi-hop retrieval controller."""

from src.multihop.controller import direct_retrieve, multihop_retrieve

__all__ = ["direct_retrieve", "multihop_retrieve"]
