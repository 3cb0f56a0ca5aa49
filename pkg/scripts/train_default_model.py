#!/usr/bin/env python3
"""Train the default checkpoint shipped at data/model/classifier.json.

Uses the recipe defaults (lr 0.001, 20 epochs, batch 32, 60/20/20) on the
seeded 1,200-example synthetic corpus. Rerunning reproduces the same file
bit-for-bit on the same kernel backend.
"""

from pathlib import Path

from proviz.nn.corpus import generate_corpus
from proviz.nn.embedding import HashingEmbedder
from proviz.nn.model import save_model
from proviz.nn.train import TrainConfig, train

MODEL_SEED = 1234


def main():
    corpus = generate_corpus()
    provider = HashingEmbedder()
    result = train(corpus, provider, TrainConfig(seed=MODEL_SEED))
    out = Path(__file__).resolve().parents[1] / "data" / "model" / "classifier.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    save_model(result.model, out)
    print(
        f"selected epoch {result.selected_epoch}, test accuracy {result.test_accuracy:.4f}; "
        f"wrote {out}"
    )


if __name__ == "__main__":
    main()
