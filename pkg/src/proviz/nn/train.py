"""From-scratch trainer for the utterance classifier.

Recipe: Adam (lr 0.001, β1 0.9, β2 0.999, ε 1e-8), cross-entropy loss,
20 epochs, batch size 32, seeded 60/20/20 train/val/test split. Epoch
losses average the per-batch cross-entropy; a checkpoint is kept per epoch
and the final model is the one with minimum validation loss. Everything is
seeded, so a fixed (corpus, config) pair reproduces bitwise-identical
parameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from proviz.history import ClassLabel
from proviz.nn import kernels
from proviz.nn.corpus import LabeledCorpus
from proviz.nn.embedding import EmbeddingProvider
from proviz.nn.model import CLASS_ORDER, ClassifierModel, init_model, predict_batch

__all__ = ["TrainConfig", "EpochStats", "TrainResult", "train", "evaluate", "evaluate_loss"]


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.001
    epochs: int = 20
    batch_size: int = 32
    split: tuple[float, float, float] = (0.60, 0.20, 0.20)
    seed: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if not math.isclose(sum(self.split), 1.0, abs_tol=1e-9):
            raise ValueError(f"split {self.split} must sum to 1.0")

    def as_dict(self) -> dict:
        return {
            "learning_rate": self.learning_rate,
            "epochs": self.epochs,
            "batch_size": self.batch_size,
            "split": list(self.split),
            "seed": self.seed,
            "optimizer": {"name": "adam", "beta1": self.beta1, "beta2": self.beta2, "eps": self.eps},
        }


@dataclass(frozen=True)
class EpochStats:
    epoch: int
    train_loss: float
    val_loss: float


@dataclass
class TrainResult:
    model: ClassifierModel  # minimum-validation-loss checkpoint
    epochs: list[EpochStats]
    checkpoints: list[ClassifierModel]  # one per epoch, meta carries the losses
    selected_epoch: int
    test_accuracy: float
    confusion: np.ndarray  # (3, 3), rows true, cols predicted
    split_sizes: tuple[int, int, int]
    test_examples: list[tuple[str, ClassLabel]] = field(default_factory=list)
    val_examples: list[tuple[str, ClassLabel]] = field(default_factory=list)


class _Adam:
    def __init__(self, params: Sequence[np.ndarray], cfg: TrainConfig):
        self.cfg = cfg
        self.t = 0
        self.state = [(np.zeros(p.size), np.zeros(p.size)) for p in params]

    def step(self, params: Sequence[np.ndarray], grads: Sequence[np.ndarray]) -> None:
        self.t += 1
        for p, g, (m, v) in zip(params, grads, self.state):
            kernels.adam_step(
                p.reshape(-1),
                np.ascontiguousarray(g.reshape(-1)),
                m,
                v,
                self.t,
                self.cfg.learning_rate,
                self.cfg.beta1,
                self.cfg.beta2,
                self.cfg.eps,
            )


def _batches(count: int, batch_size: int):
    for lo in range(0, count, batch_size):
        yield lo, min(lo + batch_size, count)


def evaluate_loss(model: ClassifierModel, x: np.ndarray, y: np.ndarray, batch_size: int) -> float:
    """Cross-entropy averaged over sequential batches (the epoch-loss rule)."""
    losses = []
    for lo, hi in _batches(len(x), batch_size):
        _, _, logits = kernels.dense_forward(x[lo:hi], model.w1, model.b1, model.w2, model.b2)
        loss, _ = kernels.cross_entropy(logits, y[lo:hi])
        losses.append(loss)
    return float(np.mean(losses))


def evaluate(model: ClassifierModel, x: np.ndarray, y: np.ndarray) -> tuple[float, np.ndarray]:
    """Accuracy and 3x3 confusion matrix (rows true, cols predicted)."""
    pred = predict_batch(model, x)
    confusion = np.zeros((len(CLASS_ORDER), len(CLASS_ORDER)), dtype=np.int64)
    for truth, guess in zip(y, pred):
        confusion[truth, guess] += 1
    return float((pred == y).mean()), confusion


def train(corpus: LabeledCorpus, provider: EmbeddingProvider, cfg: TrainConfig) -> TrainResult:
    if len(corpus) < 3:
        raise ValueError("corpus too small to train on")

    texts = corpus.texts()
    x_all = np.ascontiguousarray(
        np.stack([provider.embed(t) for t in texts]).astype(np.float64)
    )
    y_all = np.asarray([CLASS_ORDER.index(label) for label in corpus.labels()], dtype=np.int64)

    rng = np.random.default_rng(cfg.seed)
    order = rng.permutation(len(texts))
    n_train = int(len(texts) * cfg.split[0])
    n_val = int(len(texts) * cfg.split[1])
    train_idx = order[:n_train]
    val_idx = order[n_train : n_train + n_val]
    test_idx = order[n_train + n_val :]

    # every class present in the corpus must land in the training split
    if set(y_all[train_idx].tolist()) != set(y_all.tolist()):
        raise ValueError("training split is missing at least one class; reseed or grow the corpus")

    x_train, y_train = x_all[train_idx], y_all[train_idx]
    x_val, y_val = np.ascontiguousarray(x_all[val_idx]), y_all[val_idx]

    model = init_model(provider.dimension, rng)
    optimizer = _Adam(model.params(), cfg)

    epochs: list[EpochStats] = []
    checkpoints: list[ClassifierModel] = []
    for epoch in range(1, cfg.epochs + 1):
        shuffle = rng.permutation(n_train)
        batch_losses = []
        for lo, hi in _batches(n_train, cfg.batch_size):
            xb = np.ascontiguousarray(x_train[shuffle[lo:hi]])
            yb = np.ascontiguousarray(y_train[shuffle[lo:hi]])
            hidden_pre, _, logits = kernels.dense_forward(xb, model.w1, model.b1, model.w2, model.b2)
            loss, dlogits = kernels.cross_entropy(logits, yb)
            if not math.isfinite(loss):
                raise RuntimeError(
                    f"non-finite training loss at epoch {epoch}, batch {lo // cfg.batch_size}; "
                    "check the corpus and learning rate"
                )
            batch_losses.append(loss)
            grads = kernels.dense_backward(xb, hidden_pre, dlogits, model.w2)
            optimizer.step(model.params(), grads)

        train_loss = float(np.mean(batch_losses))
        val_loss = evaluate_loss(model, x_val, y_val, cfg.batch_size)
        epochs.append(EpochStats(epoch=epoch, train_loss=train_loss, val_loss=val_loss))

        checkpoint = model.copy()
        checkpoint.meta = {
            "train_config": cfg.as_dict(),
            "epoch": epoch,
            "train_loss": train_loss,
            "val_loss": val_loss,
        }
        checkpoints.append(checkpoint)

    best = min(range(len(epochs)), key=lambda i: epochs[i].val_loss)
    final = checkpoints[best].copy()

    x_test, y_test = np.ascontiguousarray(x_all[test_idx]), y_all[test_idx]
    accuracy, confusion = evaluate(final, x_test, y_test)

    return TrainResult(
        model=final,
        epochs=epochs,
        checkpoints=checkpoints,
        selected_epoch=epochs[best].epoch,
        test_accuracy=accuracy,
        confusion=confusion,
        split_sizes=(len(train_idx), len(val_idx), len(test_idx)),
        test_examples=[(texts[i], corpus.labels()[i]) for i in test_idx],
        val_examples=[(texts[i], corpus.labels()[i]) for i in val_idx],
    )
