"""Command-line entry points.

    proviz train  --corpus synthetic --seed 1234 --out runs/clf
    proviz eval   --model runs/clf/model.json --corpus synthetic
    proviz replay --config data/config.example.json --transcript data/transcripts/examples.tsv \
                  --mode P --metrics-out /tmp/metrics.json
    proviz serve  --config data/config.example.json --port 8000
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from proviz.config import load_config
from proviz.history import ClassLabel
from proviz.metrics import compute_metrics
from proviz.nn.corpus import DEFAULT_CORPUS_SEED, generate_corpus, load_corpus
from proviz.nn.embedding import HashingEmbedder
from proviz.nn.model import CLASS_ORDER, load_model, save_model
from proviz.nn.train import TrainConfig, evaluate, train
from proviz.session import run_replay


def _resolve_corpus(ref: str, seed: int, size_per_class: int):
    if ref == "synthetic":
        return generate_corpus(seed=seed, size_per_class=size_per_class)
    return load_corpus(ref)


def cmd_train(args) -> int:
    corpus = _resolve_corpus(args.corpus, DEFAULT_CORPUS_SEED, args.size_per_class)
    provider = HashingEmbedder(dimension=args.dimension, seed=args.embedding_seed)
    cfg = TrainConfig(seed=args.seed)
    started = time.time()
    result = train(corpus, provider, cfg)
    elapsed = time.time() - started

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for checkpoint in result.checkpoints:
        save_model(checkpoint, out / f"epoch_{checkpoint.meta['epoch']:02d}.json")
    save_model(result.model, out / "model.json")
    (out / "training_log.json").write_text(
        json.dumps(
            {
                "epochs": [vars(e) for e in result.epochs],
                "selected_epoch": result.selected_epoch,
                "test_accuracy": result.test_accuracy,
                "split_sizes": list(result.split_sizes),
                "seconds": elapsed,
            },
            indent=2,
        ),
        encoding="utf-8",
    )

    for stats in result.epochs:
        marker = " *" if stats.epoch == result.selected_epoch else ""
        print(f"epoch {stats.epoch:2d}  train {stats.train_loss:.4f}  val {stats.val_loss:.4f}{marker}")
    print(f"selected epoch {result.selected_epoch}; test accuracy {result.test_accuracy:.4f} ({elapsed:.1f}s)")
    print(f"wrote {len(result.checkpoints)} checkpoints and model.json to {out}")
    return 0


def cmd_eval(args) -> int:
    model = load_model(args.model)
    corpus = _resolve_corpus(args.corpus, DEFAULT_CORPUS_SEED, args.size_per_class)
    provider = HashingEmbedder(dimension=model.n, seed=args.embedding_seed)
    import numpy as np

    x = np.stack([provider.embed(t) for t in corpus.texts()])
    y = np.asarray([CLASS_ORDER.index(l) for l in corpus.labels()], dtype=np.int64)
    accuracy, confusion = evaluate(model, np.ascontiguousarray(x), y)

    print(f"accuracy: {accuracy:.4f} over {len(corpus)} examples")
    names = [label.value for label in CLASS_ORDER]
    width = max(len(n) for n in names) + 2
    print(" " * width + "  ".join(f"{n[:12]:>12}" for n in names))
    for i, name in enumerate(names):
        row = "  ".join(f"{confusion[i, j]:>12d}" for j in range(len(names)))
        print(f"{name:<{width}}{row}")
    return 0


def cmd_replay(args) -> int:
    cfg = load_config(args.config)
    if args.mode:
        cfg.mode = {"P": "proactive", "NP": "non_proactive"}.get(args.mode, args.mode)
        cfg.persona_name = "Arti" if cfg.mode == "proactive" else "Marti"
    session = run_replay(cfg, args.transcript)
    report = compute_metrics(session.events)

    if args.log_out:
        session.write_log(args.log_out)
        print(f"wrote {len(session.events)} events to {args.log_out}")
    if args.metrics_out:
        Path(args.metrics_out).write_text(json.dumps(report.to_dict(), indent=2), encoding="utf-8")
        print(f"wrote metrics to {args.metrics_out}")

    print(
        f"mode={cfg.mode} persona={cfg.persona_name}: "
        f"{report.total_utterances} utterances, {report.charts_generated} charts "
        f"({report.explicit_charts} explicit, {report.proactive_charts} proactive), "
        f"{report.suppressions} suppressions, first explicit at {report.delta_first_explicit or 'n/a'}"
    )
    return 0


def cmd_serve(args) -> int:
    try:
        import uvicorn

        from proviz.server import create_app
    except ImportError:
        print("serve needs the server extra: pip install 'proviz[server]'", file=sys.stderr)
        return 2
    cfg = load_config(args.config)
    app = create_app(cfg, ui_dir=args.ui)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="proviz", description="proactive chart assistant engine")
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train the utterance classifier")
    p_train.add_argument("--corpus", default="synthetic", help="'synthetic' or a label<TAB>text file")
    p_train.add_argument("--seed", type=int, required=True)
    p_train.add_argument("--out", required=True, help="output directory for checkpoints")
    p_train.add_argument("--size-per-class", type=int, default=400)
    p_train.add_argument("--dimension", type=int, default=256)
    p_train.add_argument("--embedding-seed", type=int, default=0)
    p_train.set_defaults(func=cmd_train)

    p_eval = sub.add_parser("eval", help="evaluate a checkpoint on a corpus")
    p_eval.add_argument("--model", required=True)
    p_eval.add_argument("--corpus", default="synthetic")
    p_eval.add_argument("--size-per-class", type=int, default=400)
    p_eval.add_argument("--embedding-seed", type=int, default=0)
    p_eval.set_defaults(func=cmd_eval)

    p_replay = sub.add_parser("replay", help="run a transcript through a session")
    p_replay.add_argument("--config", required=True)
    p_replay.add_argument("--transcript", required=True)
    p_replay.add_argument("--mode", choices=["P", "NP", "proactive", "non_proactive"])
    p_replay.add_argument("--metrics-out")
    p_replay.add_argument("--log-out")
    p_replay.set_defaults(func=cmd_replay)

    p_serve = sub.add_parser("serve", help="serve the websocket wire protocol")
    p_serve.add_argument("--config", required=True)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--ui", help="directory of built UI assets to serve at /")
    p_serve.set_defaults(func=cmd_serve)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
