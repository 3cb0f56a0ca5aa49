"""Session configuration, loadable from a JSON file.

Example:

    {
      "mode": "proactive",
      "dataset_path": "data/hcdp_subset.csv",
      "checkpoint_path": "data/model/classifier.json",
      "pause_threshold": 1.5,
      "proactive_throttle": 10.0,
      "seed": 1234,
      "embedding": {"dimension": 256, "seed": 0},
      "refinement_backend": "fallback",
      "reasoner_backends": {"attributes": "fallback"},
      "endpoints": {"main": {"url": "http://localhost:9000/v1", "model": "local"}}
    }
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

__all__ = ["SessionConfig", "load_config", "MODES"]

MODES = ("proactive", "non_proactive")
MODE_SHORTHAND = {"P": "proactive", "NP": "non_proactive"}


@dataclass
class SessionConfig:
    mode: str = "non_proactive"
    persona_name: Optional[str] = None  # defaults to Arti (P) / Marti (NP)
    pause_threshold: float = 1.5
    proactive_throttle: float = 10.0
    conveyor_capacity: int = 10
    dataset_path: str = "data/hcdp_subset.csv"
    checkpoint_path: Optional[str] = None
    seed: int = 0
    embedding_dimension: int = 256
    embedding_seed: int = 0
    refinement_backend: str = "fallback"
    reasoner_backends: dict[str, str] = field(default_factory=dict)
    summary_backend: str = "fallback"
    endpoints: dict[str, dict] = field(default_factory=dict)

    def __post_init__(self):
        self.mode = MODE_SHORTHAND.get(self.mode, self.mode)
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES} (or P/NP), got {self.mode!r}")
        if self.persona_name is None:
            self.persona_name = "Arti" if self.mode == "proactive" else "Marti"
        if self.pause_threshold <= 0:
            raise ValueError("pause_threshold must be positive")
        if self.conveyor_capacity < 1:
            raise ValueError("conveyor_capacity must be >= 1")

    def endpoint(self, ref: str) -> dict:
        """Resolve an "llm:<name>" backend reference to its endpoint entry."""
        name = ref.split(":", 1)[1]
        try:
            entry = self.endpoints[name]
        except KeyError:
            raise ValueError(f"backend {ref!r} names an endpoint missing from config.endpoints") from None
        if "url" not in entry or "model" not in entry:
            raise ValueError(f"endpoint {name!r} needs 'url' and 'model'")
        return entry


def load_config(path: str | Path) -> SessionConfig:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(doc, dict):
        raise ValueError(f"{path}: config must be a JSON object")
    embedding = doc.pop("embedding", {})
    if embedding:
        doc["embedding_dimension"] = embedding.get("dimension", 256)
        doc["embedding_seed"] = embedding.get("seed", 0)
    known = {f for f in SessionConfig.__dataclass_fields__}
    unknown = set(doc) - known
    if unknown:
        raise ValueError(f"{path}: unknown config keys {sorted(unknown)}")
    return SessionConfig(**doc)
