"""Contrastive objective: InfoNCE over cosine similarities of the next query."""

import math

import numpy as np

from src.exceptions import ConfigError, NumericError
from src.model.backward import backward
from src.model.forward import ForwardMode, next_query
from src.model.params import ModelParams, ParamGrads
from src.models.training import TrainExample
from src.store.vector_store import VectorStore


def info_nce_loss(
    pos_score: float, neg_scores: np.ndarray, temperature: float
) -> tuple[float, float, np.ndarray]:
    """-log(exp(s+/tau) / (exp(s+/tau) + sum_j exp(s-_j/tau))), log-sum-exp stable.

    Args:
        pos_score: Similarity of the positive
        neg_scores: Similarities of the negatives (may be empty)
        temperature: Softmax temperature tau > 0

    Returns:
        (loss >= 0, dL/d pos_score, dL/d neg_scores)

    Raises:
        ConfigError: If temperature <= 0
        NumericError: If the result is not finite
    """
    if not temperature > 0:
        raise ConfigError(f"temperature must be > 0, got {temperature}")
    negs = np.asarray(neg_scores, dtype=np.float64).reshape(-1)
    if negs.size == 0:
        return 0.0, 0.0, negs.copy()

    logits = np.concatenate(([pos_score], negs)) / temperature
    shift = float(np.max(logits))
    exp = np.exp(logits - shift)
    total = float(np.sum(exp))
    loss = max(math.log(total) - (logits[0] - shift), 0.0)
    probs = exp / total
    if not (math.isfinite(loss) and np.all(np.isfinite(probs))):
        raise NumericError("InfoNCE produced a non-finite value")
    return loss, (probs[0] - 1.0) / temperature, probs[1:] / temperature


def cosine_with_grad(a: np.ndarray, b: np.ndarray) -> tuple[float, np.ndarray]:
    """Cosine similarity and its gradient with respect to a.

    Raises:
        NumericError: If a has zero norm (a generated query collapsed)
    """
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        raise NumericError("Zero-norm vector in cosine similarity")
    score = float(np.dot(a, b) / (na * nb))
    grad = b / (na * nb) - score * a / (na * na)
    return score, grad


def contrastive_loss(
    params: ModelParams,
    q: np.ndarray,
    c: np.ndarray,
    positive: np.ndarray,
    negatives: np.ndarray,
    temperature: float,
    mode: ForwardMode | str = ForwardMode.TRAINING,
    rng: np.random.Generator | None = None,
) -> tuple[float, ParamGrads, np.ndarray, np.ndarray]:
    """Loss of one (q, c) pair against raw positive/negative embeddings.

    Returns:
        (loss, parameter gradients, dL/dq, dL/dc)
    """
    predicted, trace = next_query(params, q, c, mode=mode, rng=rng)
    pos_score, pos_grad = cosine_with_grad(predicted, positive)
    neg_rows = np.asarray(negatives, dtype=np.float64).reshape(-1, params.d)
    neg_scores = np.empty(neg_rows.shape[0])
    neg_grads = np.empty_like(neg_rows)
    for j, neg in enumerate(neg_rows):
        neg_scores[j], neg_grads[j] = cosine_with_grad(predicted, neg)

    loss, d_pos, d_negs = info_nce_loss(pos_score, neg_scores, temperature)
    upstream = d_pos * pos_grad + d_negs @ neg_grads
    grads, grad_q, grad_c = backward(params, trace, upstream)
    return loss, grads, grad_q, grad_c


def example_loss(
    params: ModelParams,
    example: TrainExample,
    store: VectorStore,
    temperature: float,
    rng: np.random.Generator | None = None,
    mode: ForwardMode | str = ForwardMode.TRAINING,
) -> tuple[float, ParamGrads]:
    """Loss and parameter gradients for one training example.

    Positive and negatives are resolved to their stored embeddings.

    Raises:
        UnknownChunkError: If an id is not in the store
        DimensionError: If example embeddings differ from the model dimension
    """
    positive = store.get_embedding(example.positive_id)
    if example.negative_ids:
        negatives = np.stack([store.get_embedding(i) for i in example.negative_ids])
    else:
        negatives = np.empty((0, params.d))
    loss, grads, _, _ = contrastive_loss(
        params,
        np.asarray(example.query_emb, dtype=np.float64),
        np.asarray(example.context_emb, dtype=np.float64),
        positive,
        negatives,
        temperature,
        mode=mode,
        rng=rng,
    )
    return loss, grads
