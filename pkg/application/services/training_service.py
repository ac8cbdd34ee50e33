# application/services/training_service.py
# -----------------------------------------------------------------------------
# Adam on masked L1. Batch members run forward/backward independently (threads
# when workers > 1) and their gradients are reduced in batch order, so results
# do not depend on scheduling.
# -----------------------------------------------------------------------------

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from common.errors import DatasetError, NonFiniteError, TrainingDivergedError
from domain.contracts.i_example_source import IExampleSource
from domain.entities.network_spec import TrainConfig
from domain.entities.training_example import TrainingExample
from domain.network.adam import Adam
from domain.network.stack import LayerStack
from domain.numerics.tape import GradTape

logger = logging.getLogger(__name__)


def masked_l1(prediction: np.ndarray, target: np.ndarray) -> Tuple[float, np.ndarray]:
    """
    Mean |Z − T| over pixels with a valid (positive, finite) target, and its gradient.

    Raises:
        DatasetError: the target has no valid pixel.
    """
    z = np.asarray(prediction, dtype=np.float64)
    t = np.asarray(target, dtype=np.float64)
    valid = np.isfinite(t) & (t > 0)
    count = int(np.count_nonzero(valid))
    if count == 0:
        raise DatasetError("target has no valid pixels")
    diff = np.where(valid, z - np.where(valid, t, 0.0), 0.0)
    loss = float(np.abs(diff).sum() / count)
    return loss, np.sign(diff) / count


def example_gradients(model: LayerStack, example: TrainingExample) -> Tuple[float, List[np.ndarray]]:
    """Loss of one example and its gradients, aligned with model.parameters()."""
    tape = GradTape()
    out = model.forward(example.inputs, tape)
    loss, grad = masked_l1(out.data, example.target)
    grads: List[np.ndarray] = []
    for layer_grads in tape.backward(grad):
        grads.extend([layer_grads.grad_w, layer_grads.grad_b])
    return loss, grads


@dataclass
class TrainResult:
    model: LayerStack
    history: List[float] = field(default_factory=list)
    best_epoch: Optional[int] = None


def _reduce(batch: Sequence[Tuple[float, List[np.ndarray]]]) -> List[np.ndarray]:
    total = [np.array(g, dtype=np.float64, copy=True) for g in batch[0][1]]
    for _, grads in batch[1:]:
        for acc, g in zip(total, grads):
            acc += g
    return [acc / len(batch) for acc in total]


def train(model: LayerStack, source: IExampleSource, cfg: TrainConfig) -> TrainResult:
    """
    Train `model` in place.

    The epoch loss is the mean example loss summed in example order. With
    keep_best, the parameters in effect at the start of the best epoch are
    restored at the end, which under full-batch training are the parameters
    that produced that epoch's loss.

    Raises:
        DatasetError: the source is empty.
        TrainingDivergedError: a loss, gradient or parameter became non-finite.
    """
    if len(source) == 0:
        raise DatasetError("cannot train on an empty dataset")
    optimizer = Adam(model.parameters(), cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.eps_opt)
    rng = np.random.default_rng(cfg.seed)
    result = TrainResult(model=model)
    best_loss = np.inf
    best_params: Optional[List[np.ndarray]] = None

    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        for epoch in range(cfg.epochs):
            examples = source.epoch_examples(epoch)
            start_params = model.snapshot() if cfg.keep_best else None
            losses = np.zeros(len(examples), dtype=np.float64)
            order = rng.permutation(len(examples))
            for first in range(0, len(order), cfg.batch_size):
                indices = order[first:first + cfg.batch_size]
                batch = [examples[i] for i in indices]
                try:
                    if cfg.workers > 1:
                        outcomes = list(pool.map(lambda ex: example_gradients(model, ex), batch))
                    else:
                        outcomes = [example_gradients(model, ex) for ex in batch]
                    for i, (loss, _) in zip(indices, outcomes):
                        if not np.isfinite(loss):
                            raise NonFiniteError(f"loss of example {examples[i].name} is {loss}")
                        losses[i] = loss
                    optimizer.step(_reduce(outcomes))
                    lifted = model.keep_positive_mass()
                    if lifted:
                        logger.debug("epoch %d: lifted %d relu_shift filter(s) with no mass", epoch + 1, lifted)
                except NonFiniteError as e:
                    raise TrainingDivergedError(f"epoch {epoch + 1}: {e}") from e

            epoch_loss = float(np.sum(losses) / len(losses))
            result.history.append(epoch_loss)
            if cfg.keep_best and epoch_loss < best_loss:
                best_loss, best_params, result.best_epoch = epoch_loss, start_params, epoch + 1
            if cfg.log_every and (epoch + 1) % cfg.log_every == 0:
                logger.info("epoch=%d loss=%.6g", epoch + 1, epoch_loss)

    if best_params is not None:
        model.restore(best_params)
        logger.info("restored parameters of epoch %d (loss %.6g)", result.best_epoch, best_loss)
    return result
