"""Utterance classifier: embeddings, model, corpus, and trainer."""

from proviz.nn.embedding import HashingEmbedder
from proviz.nn.model import CLASS_ORDER, ClassifierModel, classify, forward, load_model, save_model
from proviz.nn.train import TrainConfig, TrainResult, evaluate, train

__all__ = [
    "HashingEmbedder",
    "CLASS_ORDER",
    "ClassifierModel",
    "classify",
    "forward",
    "load_model",
    "save_model",
    "TrainConfig",
    "TrainResult",
    "evaluate",
    "train",
]
