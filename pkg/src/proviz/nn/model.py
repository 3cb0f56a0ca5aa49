"""Two-layer utterance classifier: n -> 128 (ReLU) -> 3 (softmax).

Output order is fixed: ProactiveOpportunity, ExplicitQuery, NonQuery. That
order doubles as the argmax tie-break (argmax returns the first maximum),
so ties resolve proactive-first deterministically.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from proviz.history import ClassLabel
from proviz.nn import kernels
from proviz.nn.embedding import EmbeddingProvider

__all__ = [
    "CLASS_ORDER",
    "HIDDEN_UNITS",
    "ClassifierModel",
    "CheckpointError",
    "forward",
    "classify",
    "save_model",
    "load_model",
]

CLASS_ORDER: tuple[ClassLabel, ...] = (
    ClassLabel.PROACTIVE,
    ClassLabel.EXPLICIT,
    ClassLabel.NON_QUERY,
)
HIDDEN_UNITS = 128
FORMAT_VERSION = 1


class CheckpointError(ValueError):
    """Raised when a checkpoint file cannot be loaded as a valid model."""


@dataclass
class ClassifierModel:
    w1: np.ndarray  # (n, hidden)
    b1: np.ndarray  # (hidden,)
    w2: np.ndarray  # (hidden, 3)
    b2: np.ndarray  # (3,)
    meta: dict = field(default_factory=dict)  # train_config/epoch/losses, carried into checkpoints

    @property
    def n(self) -> int:
        return self.w1.shape[0]

    def copy(self) -> "ClassifierModel":
        return ClassifierModel(
            self.w1.copy(), self.b1.copy(), self.w2.copy(), self.b2.copy(), dict(self.meta)
        )

    def params(self) -> list[np.ndarray]:
        return [self.w1, self.b1, self.w2, self.b2]


def init_model(n: int, rng: np.random.Generator, hidden: int = HIDDEN_UNITS) -> ClassifierModel:
    # He-normal, zero biases; seeded so training is bitwise reproducible.
    w1 = rng.normal(0.0, math.sqrt(2.0 / n), size=(n, hidden))
    w2 = rng.normal(0.0, math.sqrt(2.0 / hidden), size=(hidden, len(CLASS_ORDER)))
    return ClassifierModel(w1=w1, b1=np.zeros(hidden), w2=w2, b2=np.zeros(len(CLASS_ORDER)))


def forward(model: ClassifierModel, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Logits and softmax probabilities for one embedding vector."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (model.n,):
        raise ValueError(f"expected embedding of shape ({model.n},), got {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("embedding contains non-finite entries")
    _, _, logits = kernels.dense_forward(
        np.ascontiguousarray(x.reshape(1, -1)), model.w1, model.b1, model.w2, model.b2
    )
    probs = kernels.softmax(logits)
    return logits[0], probs[0]


def classify(
    model: ClassifierModel, provider: EmbeddingProvider, text: str
) -> tuple[ClassLabel, np.ndarray]:
    if not text.strip():
        raise ValueError("cannot classify an empty utterance")
    _, probs = forward(model, provider.embed(text))
    return CLASS_ORDER[int(np.argmax(probs))], probs


def predict_batch(model: ClassifierModel, x: np.ndarray) -> np.ndarray:
    """Argmax class indices for a batch of embeddings."""
    _, _, logits = kernels.dense_forward(
        np.ascontiguousarray(x), model.w1, model.b1, model.w2, model.b2
    )
    return np.argmax(kernels.softmax(logits), axis=1)


def save_model(model: ClassifierModel, path: str | Path) -> None:
    """Write a self-describing JSON checkpoint with full float precision."""
    doc = {
        "format_version": FORMAT_VERSION,
        "n": model.n,
        "class_order": [label.value for label in CLASS_ORDER],
        "W1": model.w1.tolist(),
        "b1": model.b1.tolist(),
        "W2": model.w2.tolist(),
        "b2": model.b2.tolist(),
        "train_config": model.meta.get("train_config"),
        "epoch": model.meta.get("epoch"),
        "train_loss": model.meta.get("train_loss"),
        "val_loss": model.meta.get("val_loss"),
    }
    Path(path).write_text(json.dumps(doc), encoding="utf-8")


def load_model(path: str | Path) -> ClassifierModel:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from None

    if not isinstance(doc, dict) or doc.get("format_version") != FORMAT_VERSION:
        raise CheckpointError(f"unsupported checkpoint format in {path}")
    if doc.get("class_order") != [label.value for label in CLASS_ORDER]:
        raise CheckpointError(f"checkpoint class order {doc.get('class_order')!r} does not match")

    try:
        w1 = np.asarray(doc["W1"], dtype=np.float64)
        b1 = np.asarray(doc["b1"], dtype=np.float64)
        w2 = np.asarray(doc["W2"], dtype=np.float64)
        b2 = np.asarray(doc["b2"], dtype=np.float64)
    except (KeyError, ValueError) as exc:
        raise CheckpointError(f"malformed weights in {path}: {exc}") from None

    n = int(doc["n"])
    hidden = b1.shape[0] if b1.ndim == 1 else 0
    if w1.shape != (n, hidden) or w2.shape != (hidden, len(CLASS_ORDER)) or b2.shape != (len(CLASS_ORDER),):
        raise CheckpointError(
            f"inconsistent shapes in {path}: W1 {w1.shape}, b1 {b1.shape}, W2 {w2.shape}, b2 {b2.shape}"
        )
    for arr in (w1, b1, w2, b2):
        if not np.all(np.isfinite(arr)):
            raise CheckpointError(f"non-finite parameters in {path}")

    meta = {
        "train_config": doc.get("train_config"),
        "epoch": doc.get("epoch"),
        "train_loss": doc.get("train_loss"),
        "val_loss": doc.get("val_loss"),
    }
    return ClassifierModel(w1=w1, b1=b1, w2=w2, b2=b2, meta=meta)


def zero_model(n: int, hidden: int = HIDDEN_UNITS) -> ClassifierModel:
    """All-zero model; useful for symmetry tests (uniform probabilities)."""
    return ClassifierModel(
        w1=np.zeros((n, hidden)),
        b1=np.zeros(hidden),
        w2=np.zeros((hidden, len(CLASS_ORDER))),
        b2=np.zeros(len(CLASS_ORDER)),
    )
