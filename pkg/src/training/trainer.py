"""Mini-batch contrastive training loop."""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from functools import partial

import numpy as np

from src.config import settings
from src.exceptions import DataError, DimensionError
from src.model.forward import ForwardMode
from src.model.params import ModelParams, ParamGrads, init_params, zero_params
from src.models.training import TrainConfig, TrainExample, TrainReport
from src.store.vector_store import VectorStore
from src.training.loss import example_loss
from src.training.optimizer import AdamWState, adamw_step

logger = logging.getLogger(__name__)


def initial_params(d: int, config: TrainConfig) -> ModelParams:
    """Starting parameters for a run, per config.init_scheme."""
    if config.init_scheme == "zero":
        return zero_params(d, dropout_rate=config.dropout_rate, variant=config.variant)
    return init_params(
        d, config.seed, dropout_rate=config.dropout_rate, variant=config.variant
    )


def train(
    dataset: list[TrainExample],
    store: VectorStore,
    config: TrainConfig,
    params: ModelParams | None = None,
    threads: int | None = None,
) -> tuple[ModelParams, TrainReport]:
    """Train TreeHop parameters with InfoNCE and AdamW.

    Each epoch shuffles the dataset with a generator seeded from config.seed.
    Batch loss and gradients are means over the batch. Per-example gradients
    may be computed in parallel but are summed in batch order, and each
    example draws its dropout mask from its own (seed, epoch, index) stream,
    so results do not depend on the thread count.

    Args:
        dataset: Training examples (non-empty)
        store: Store resolving positive/negative ids
        config: Hyperparameters
        params: Starting parameters (default: initial_params(d, config));
            updated in place
        threads: Worker cap (default: settings.worker_count())

    Returns:
        (trained params, report with per-epoch mean loss)

    Raises:
        DataError: If the dataset is empty
        DimensionError: If the store and examples disagree on dimension
        NumericError: If a gradient becomes non-finite
    """
    if not dataset:
        raise DataError("Training dataset is empty")
    d = len(dataset[0].query_emb)
    if store.dim != d:
        raise DimensionError(
            f"Store dimension {store.dim} does not match examples ({d})",
            expected=store.dim,
            got=d,
        )
    if params is None:
        params = initial_params(d, config)
    elif params.d != d:
        raise DimensionError(
            f"Model dimension {params.d} does not match examples ({d})",
            expected=params.d,
            got=d,
        )

    state = AdamWState()
    order_rng = np.random.default_rng(config.seed)
    workers = threads or settings.worker_count()
    report = TrainReport(config=config, example_count=len(dataset))
    start = time.perf_counter()

    def one_example(epoch: int, idx: int) -> tuple[float, ParamGrads]:
        rng = np.random.default_rng([config.seed, epoch, idx])
        return example_loss(
            params,
            dataset[idx],
            store,
            config.temperature,
            rng=rng,
            mode=ForwardMode.TRAINING,
        )

    logger.info(
        f"Training {params.parameter_count()} parameters on {len(dataset)} "
        f"examples (d={d}, epochs={config.epochs}, "
        f"batch={config.batch_size}, lr={config.learning_rate}, workers={workers})"
    )
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for epoch in range(config.epochs):
            order = order_rng.permutation(len(dataset))
            batch_losses: list[float] = []
            for batch_start in range(0, len(order), config.batch_size):
                batch_end = batch_start + config.batch_size
                batch = [int(i) for i in order[batch_start:batch_end]]
                results = list(pool.map(partial(one_example, epoch), batch))

                grads = ParamGrads.zeros(d)
                loss_sum = 0.0
                for loss, example_grads in results:
                    loss_sum += loss
                    grads.add_(example_grads)
                grads.scale_(1.0 / len(batch))
                adamw_step(params, grads, state, config)

                batch_losses.append(loss_sum / len(batch))
                logger.debug(
                    f"epoch {epoch + 1} step {state.step}: "
                    f"loss={batch_losses[-1]:.6f} "
                    f"grad_max={grads.max_abs():.3e}"
                )

            epoch_loss = float(np.mean(batch_losses))
            report.epoch_losses.append(epoch_loss)
            logger.info(
                f"Epoch {epoch + 1}/{config.epochs}: mean loss {epoch_loss:.6f}"
            )

    report.steps = state.step
    report.wall_clock_seconds = time.perf_counter() - start
    return params, report
