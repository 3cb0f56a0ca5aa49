"""Embedding, model forward/classify, and checkpoint round-trips."""

import math
import random

import numpy as np
import pytest

from proviz.history import ClassLabel
from proviz.nn.corpus import generate_corpus
from proviz.nn.embedding import HashingEmbedder
from proviz.nn.model import (
    CLASS_ORDER,
    CheckpointError,
    ClassifierModel,
    classify,
    forward,
    load_model,
    save_model,
    zero_model,
)


def test_embedding_shape_determinism_and_norm():
    emb = HashingEmbedder(dimension=64, seed=3)
    a = emb.embed("Show rainfall for Maui")
    b = emb.embed("Show rainfall for Maui")
    assert a.shape == (64,)
    assert np.array_equal(a, b)
    assert np.isfinite(a).all()
    assert np.linalg.norm(a) == pytest.approx(1.0)
    assert np.linalg.norm(emb.embed("")) == 0.0


def test_embedding_seed_changes_hash():
    a = HashingEmbedder(dimension=64, seed=0).embed("rainfall")
    b = HashingEmbedder(dimension=64, seed=1).embed("rainfall")
    assert not np.array_equal(a, b)


def test_zero_model_uniform_probabilities():
    model = zero_model(n=6)
    logits, probs = forward(model, np.ones(6))
    assert np.array_equal(logits, np.zeros(3))
    assert np.allclose(probs, [1 / 3] * 3)


def test_zero_model_tie_breaks_to_proactive():
    model = zero_model(n=8)

    class Ones:
        dimension = 8

        def embed(self, text):
            return np.ones(8)

    label, probs = classify(model, Ones(), "anything")
    assert label is ClassLabel.PROACTIVE  # documented tie-break order
    assert math.isclose(float(probs.sum()), 1.0, rel_tol=1e-12)


def manual_forward(model, x):
    """Plain-Python matrix products, independent of the kernel code."""
    hidden = []
    for j in range(model.w1.shape[1]):
        acc = model.b1[j]
        for k in range(model.w1.shape[0]):
            acc += x[k] * model.w1[k, j]
        hidden.append(max(acc, 0.0))
    logits = []
    for j in range(model.w2.shape[1]):
        acc = model.b2[j]
        for k in range(model.w2.shape[0]):
            acc += hidden[k] * model.w2[k, j]
        logits.append(acc)
    return logits


def test_forward_matches_manual_product_on_toy_model():
    rng = np.random.default_rng(99)
    model = ClassifierModel(
        w1=rng.normal(size=(4, 5)),
        b1=rng.normal(size=5),
        w2=rng.normal(size=(5, 3)),
        b2=rng.normal(size=3),
    )
    x = rng.normal(size=4)
    logits, probs = forward(model, x)
    assert np.allclose(logits, manual_forward(model, list(x)), rtol=1e-12)
    assert probs.sum() == pytest.approx(1.0, abs=1e-9)


def test_forward_rejects_bad_input():
    model = zero_model(n=4)
    with pytest.raises(ValueError, match="shape"):
        forward(model, np.ones(5))
    with pytest.raises(ValueError, match="finite"):
        forward(model, np.array([1.0, np.nan, 0.0, 0.0]))
    with pytest.raises(ValueError, match="empty"):
        classify(model, HashingEmbedder(dimension=4), "   ")


def test_scaling_output_layer_preserves_argmax():
    rng = np.random.default_rng(5)
    model = ClassifierModel(
        w1=rng.normal(size=(6, 8)),
        b1=rng.normal(size=8),
        w2=rng.normal(size=(8, 3)),
        b2=rng.normal(size=3),
    )
    scaled = ClassifierModel(w1=model.w1, b1=model.b1, w2=model.w2 * 3.7, b2=model.b2 * 3.7)
    for _ in range(25):
        x = rng.normal(size=6)
        assert np.argmax(forward(model, x)[1]) == np.argmax(forward(scaled, x)[1])


def test_paper_example_classifications(model, provider):
    explicit, _ = classify(model, provider, "Generate a chart on the solar energy for the Big Island.")
    proactive, _ = classify(model, provider, "Station 4 on Oahu has the most rainfall.")
    assert explicit is ClassLabel.EXPLICIT
    assert proactive is ClassLabel.PROACTIVE


def test_save_load_roundtrip_classifies_identically(tmp_path, model, provider):
    path = tmp_path / "model.json"
    save_model(model, path)
    loaded = load_model(path)
    for arr, back in zip(model.params(), loaded.params()):
        assert np.array_equal(arr, back)  # full round-trip precision

    rng = random.Random(0)
    words = ["rainfall", "show", "station", "Maui", "the", "most", "chart", "okay", "wind", "next"]
    for _ in range(100):
        text = " ".join(rng.choices(words, k=rng.randint(2, 8)))
        assert classify(model, provider, text)[0] is classify(loaded, provider, text)[0]


def test_truncated_checkpoint_is_an_error(tmp_path, model):
    path = tmp_path / "model.json"
    save_model(model, path)
    path.write_text(path.read_text()[: path.stat().st_size // 2])
    with pytest.raises(CheckpointError):
        load_model(path)


def test_checkpoint_shape_and_finiteness_validation(tmp_path, model):
    import json

    path = tmp_path / "model.json"
    save_model(model, path)
    doc = json.loads(path.read_text())
    doc["W2"] = [[0.0] * 3] * 7  # wrong hidden size
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    with pytest.raises(CheckpointError, match="shapes"):
        load_model(bad)

    doc = json.loads(path.read_text())
    doc["b2"] = [0.0, float("inf"), 0.0]
    bad.write_text(json.dumps(doc).replace("Infinity", "1e999"))
    with pytest.raises(CheckpointError):
        load_model(bad)


def test_corpus_generator_deterministic_and_labeled():
    a = generate_corpus(seed=11, size_per_class=20)
    b = generate_corpus(seed=11, size_per_class=20)
    assert a.examples == b.examples
    assert len(a) == 60
    counts = {label: 0 for label in CLASS_ORDER}
    for text, label in a.examples:
        assert text.strip()
        counts[label] += 1
    assert set(counts.values()) == {20}
    c = generate_corpus(seed=12, size_per_class=20)
    assert c.examples != a.examples


def test_corpus_file_roundtrip(tmp_path):
    from proviz.nn.corpus import load_corpus, save_corpus

    corpus = generate_corpus(seed=2, size_per_class=5)
    path = tmp_path / "corpus.tsv"
    save_corpus(corpus, path)
    loaded = load_corpus(path)
    assert loaded.examples == corpus.examples
    assert loaded.provenance == "external-file"

    bad = tmp_path / "bad.tsv"
    bad.write_text("NotALabel\thello\n")
    with pytest.raises(ValueError, match="NotALabel"):
        load_corpus(bad)
