"""The session loop: wiring, mode gate, conveyor, and the event log.

One Session owns all mutable state (history, conveyor, log); every mutation
happens through its methods, which is the ordering contract clients rely
on. Each processed utterance appends a deterministic run of events:

    utterance -> classification -> [refined_query -> plan -> chart_generated]

Explicit queries surface their failures as ``error`` events; proactive
opportunities run the whole pipeline speculatively and either emit their
three events, emit one ``suppression`` event (duplicate title or throttle),
or vanish without a trace when any stage fails.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Optional

from proviz.config import SessionConfig
from proviz.datastore import ClimateStore, ingest_csv, station_sort_key
from proviz.history import ChartEvent, ClassLabel, ContextHistory
from proviz.nn.embedding import HashingEmbedder
from proviz.nn.model import ClassifierModel, classify, load_model
from proviz.presenter import ChartSpec, render_plan, summarize
from proviz.reasoner import ChartPlan, LlmStageBackend, Reasoner, StageError
from proviz.refiner import LlmRefinementBackend, RefineError, RefinedQuery, Refiner, suppress_duplicate
from proviz.segmenter import EchoBackend, Utterance, read_replay_file, segment_channels, transcribe

__all__ = ["SessionEvent", "Session", "build_session", "run_replay", "read_log", "canonical_log_lines"]

EVENT_KINDS = (
    "session_start",
    "session_end",
    "utterance",
    "classification",
    "refined_query",
    "plan",
    "chart_generated",
    "chart_selected",
    "chart_deleted",
    "move_resize",
    "suppression",
    "error",
)


@dataclass(frozen=True)
class SessionEvent:
    seq: int
    t: float  # session-relative seconds
    kind: str
    payload: dict

    def to_dict(self) -> dict:
        return {"seq": self.seq, "t": self.t, "kind": self.kind, "payload": self.payload}


@dataclass
class Conveyor:
    capacity: int = 10
    items: list[str] = field(default_factory=list)

    def push(self, spec_id: str) -> None:
        if spec_id in self.items:
            return
        self.items.append(spec_id)
        if len(self.items) > self.capacity:
            self.items.pop(0)


class Session:
    def __init__(
        self,
        cfg: SessionConfig,
        store: ClimateStore,
        model: ClassifierModel,
        provider: Optional[HashingEmbedder] = None,
        refiner: Optional[Refiner] = None,
        reasoner: Optional[Reasoner] = None,
        summary_backend: Optional[Callable] = None,
        clock: Optional[Callable[[], float]] = None,
    ):
        self.cfg = cfg
        self.store = store
        self.model = model
        self.provider = provider or HashingEmbedder(cfg.embedding_dimension, cfg.embedding_seed)
        if self.provider.dimension != model.n:
            raise ValueError(f"embedding dimension {self.provider.dimension} != model input size {model.n}")
        self.refiner = refiner or Refiner(cfg.mode, station_islands=store.station_islands())
        self.reasoner = reasoner or Reasoner(store)
        self.summary_backend = summary_backend
        self.clock = clock or (lambda: 0.0)

        self.history = ContextHistory()
        self.conveyor = Conveyor(capacity=cfg.conveyor_capacity)
        self.events: list[SessionEvent] = []
        self.specs: dict[str, ChartSpec] = {}
        self.workspace: set[str] = set()
        self._seq = itertools.count(1)
        self._spec_counter = itertools.count(1)
        self._utterance_counter = itertools.count(1)
        self._last_proactive_t: Optional[float] = None
        self._listeners: list[Callable[[SessionEvent], None]] = []

    # -- event plumbing --------------------------------------------------

    def add_listener(self, callback: Callable[[SessionEvent], None]) -> None:
        self._listeners.append(callback)

    def remove_listener(self, callback: Callable[[SessionEvent], None]) -> None:
        if callback in self._listeners:
            self._listeners.remove(callback)

    def _emit(self, kind: str, t: float, payload: dict) -> SessionEvent:
        assert kind in EVENT_KINDS, kind
        event = SessionEvent(seq=next(self._seq), t=t, kind=kind, payload=payload)
        self.events.append(event)
        for listener in self._listeners:
            listener(event)
        return event

    def next_utterance_id(self) -> int:
        return next(self._utterance_counter)

    # -- lifecycle --------------------------------------------------------

    def start(self) -> None:
        self._emit(
            "session_start",
            0.0,
            {
                "mode": self.cfg.mode,
                "persona_name": self.cfg.persona_name,
                "pause_threshold": self.cfg.pause_threshold,
                "proactive_throttle": self.cfg.proactive_throttle,
                "conveyor_capacity": self.cfg.conveyor_capacity,
            },
        )

    def end(self, t: Optional[float] = None) -> None:
        last_t = t if t is not None else (self.events[-1].t if self.events else 0.0)
        generated = sum(1 for e in self.events if e.kind == "chart_generated")
        utterances = sum(1 for e in self.events if e.kind == "utterance")
        self._emit("session_end", last_t, {"utterances": utterances, "charts_generated": generated})

    # -- the pipeline ------------------------------------------------------

    def handle_utterance(self, u: Utterance) -> None:
        t = u.t_end
        self._emit(
            "utterance",
            t,
            {"id": u.id, "speaker": u.speaker, "text": u.text, "t_start": u.t_start, "t_end": u.t_end},
        )
        self.history.push_utterance(u)

        label, probs = classify(self.model, self.provider, u.text)
        self._emit(
            "classification",
            t,
            {"utterance_id": u.id, "label": label.value, "probabilities": [float(p) for p in probs]},
        )

        if label is ClassLabel.NON_QUERY:
            return
        if label is ClassLabel.PROACTIVE and self.cfg.mode != "proactive":
            return
        origin = "explicit" if label is ClassLabel.EXPLICIT else "proactive"
        if origin == "proactive":
            self._run_proactive(u, t)
        else:
            self._run_explicit(u, t)

    def _run_explicit(self, u: Utterance, t: float) -> None:
        doc = self.history.snapshot()
        try:
            refined = self.refiner.refine(u, "explicit", doc)
        except RefineError as exc:
            self._emit("error", t, {"origin": "explicit", "stage": "refine", "message": str(exc), "source_utterance_id": u.id})
            return
        assert refined is not None
        self._emit_refined(refined, doc.text, t)
        try:
            chart_plan = self.reasoner.plan(refined)
        except StageError as exc:
            self._emit("error", t, {"origin": "explicit", "stage": exc.stage, "message": str(exc), "source_utterance_id": u.id})
            return
        self._emit_plan(chart_plan, refined, t)
        self._generate_chart(chart_plan, refined, t)

    def _run_proactive(self, u: Utterance, t: float) -> None:
        # generation throttle: at most one proactive chart per throttle window
        if (
            self._last_proactive_t is not None
            and t - self._last_proactive_t < self.cfg.proactive_throttle
        ):
            self._emit(
                "suppression",
                t,
                {"origin": "proactive", "reason": "throttled", "source_utterance_id": u.id},
            )
            return

        # Speculative pipeline: nothing is logged unless a chart results.
        doc = self.history.snapshot()
        refined = self.refiner.refine(u, "proactive", doc)
        if refined is None:
            return
        try:
            chart_plan = self.reasoner.plan(refined)
        except StageError:
            return
        if suppress_duplicate(chart_plan.title, self.history):
            self._emit(
                "suppression",
                t,
                {
                    "origin": "proactive",
                    "reason": "duplicate",
                    "candidate_title": chart_plan.title,
                    "dedupe_key": ChartEvent("generated", chart_plan.title, t).dedupe_key,
                    "source_utterance_id": u.id,
                },
            )
            return
        spec = render_plan(chart_plan, self.store, spec_id="pending", origin="proactive")
        if spec.empty:
            return
        self._emit_refined(refined, doc.text, t)
        self._emit_plan(chart_plan, refined, t)
        self._generate_chart(chart_plan, refined, t, prerendered=spec)
        self._last_proactive_t = t

    def _emit_refined(self, refined: RefinedQuery, doc_text: str, t: float) -> None:
        self._emit(
            "refined_query",
            t,
            {
                "text": refined.text,
                "origin": refined.origin,
                "source_utterance_id": refined.source_utterance_id,
                "context_digest": refined.context_digest,
                "context_document": doc_text,
            },
        )

    def _emit_plan(self, chart_plan: ChartPlan, refined: RefinedQuery, t: float) -> None:
        self._emit(
            "plan",
            t,
            {
                "origin": refined.origin,
                "source_utterance_id": refined.source_utterance_id,
                "attributes": [a.value for a in chart_plan.attributes],
                "stations": sorted(chart_plan.stations, key=station_sort_key),
                "date_range": [d.isoformat() for d in chart_plan.date_range],
                "transform": {
                    "aggregation": chart_plan.transform.aggregation.value,
                    "group_by": chart_plan.transform.group_by.value if chart_plan.transform.group_by else None,
                    "filter": chart_plan.transform.filter,
                },
                "chart_type": chart_plan.chart_type.value,
                "title": chart_plan.title,
                "reasoning": chart_plan.reasoning,
            },
        )

    def _generate_chart(
        self,
        chart_plan: ChartPlan,
        refined: RefinedQuery,
        t: float,
        prerendered: Optional[ChartSpec] = None,
    ) -> None:
        spec_id = f"spec-{next(self._spec_counter):04d}"
        spec = prerendered or render_plan(chart_plan, self.store, spec_id="pending", origin=refined.origin)
        spec = replace(spec, spec_id=spec_id)
        spec = replace(spec, summary=summarize(chart_plan, spec, self.store, self.summary_backend))

        self.specs[spec_id] = spec
        self.conveyor.push(spec_id)
        self.history.record_chart(ChartEvent("generated", spec.title, t))
        self._emit(
            "chart_generated",
            t,
            {
                "spec_id": spec_id,
                "origin": refined.origin,
                "title": spec.title,
                "dedupe_key": spec.dedupe_key,
                "summary": spec.summary,
                "source_utterance_id": refined.source_utterance_id,
                "spec": spec.to_dict(),
            },
        )

    # -- client interactions ----------------------------------------------

    def select_chart(self, spec_id: str, t: Optional[float] = None) -> bool:
        t = self.clock() if t is None else t
        if spec_id not in self.conveyor.items and spec_id not in self.workspace:
            self._emit("error", t, {"origin": "client", "message": f"unknown or unavailable chart {spec_id!r}", "spec_id": spec_id})
            return False
        spec = self.specs[spec_id]
        self.workspace.add(spec_id)  # idempotent: one workspace copy
        self.history.record_chart(ChartEvent("selected", spec.title, t))
        self._emit("chart_selected", t, {"spec_id": spec_id, "title": spec.title})
        return True

    def delete_chart(self, spec_id: str, t: Optional[float] = None) -> bool:
        t = self.clock() if t is None else t
        if spec_id not in self.workspace and spec_id not in self.conveyor.items:
            self._emit("error", t, {"origin": "client", "message": f"unknown or unavailable chart {spec_id!r}", "spec_id": spec_id})
            return False
        self.workspace.discard(spec_id)
        if spec_id in self.conveyor.items:
            self.conveyor.items.remove(spec_id)
        self._emit("chart_deleted", t, {"spec_id": spec_id})
        return True

    def move_resize(self, spec_id: str, x: float, y: float, w: float, h: float, t: Optional[float] = None) -> bool:
        t = self.clock() if t is None else t
        if spec_id not in self.workspace:
            self._emit("error", t, {"origin": "client", "message": f"chart {spec_id!r} is not in the workspace", "spec_id": spec_id})
            return False
        self._emit("move_resize", t, {"spec_id": spec_id, "x": x, "y": y, "w": w, "h": h})
        return True

    # -- persistence --------------------------------------------------------

    def write_log(self, path: str | Path) -> None:
        lines = [json.dumps(e.to_dict(), sort_keys=True, ensure_ascii=False) for e in self.events]
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_log(path: str | Path) -> list[SessionEvent]:
    events = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        doc = json.loads(line)
        events.append(SessionEvent(seq=doc["seq"], t=doc["t"], kind=doc["kind"], payload=doc["payload"]))
    return events


def canonical_log_lines(events: list[SessionEvent], include_proactive: bool = True) -> list[str]:
    """Serialized events comparable across modes and runs.

    Canonicalization: seq dropped (restriction renumbers), spec ids replaced
    by first-seen ordinals, and the two mode-identifying bookkeeping spots
    neutralized (session_start's mode/persona; session_end's totals are
    recomputed over the included events).
    """
    ids: dict[str, str] = {}

    def canon(value):
        if isinstance(value, dict):
            return {
                k: (ids.setdefault(v, f"spec#{len(ids) + 1}") if k == "spec_id" and isinstance(v, str) else canon(v))
                for k, v in value.items()
            }
        if isinstance(value, list):
            return [canon(v) for v in value]
        return value

    included = [
        e for e in events if include_proactive or e.payload.get("origin") != "proactive"
    ]
    lines = []
    for event in included:
        payload = canon(event.payload)
        if event.kind == "session_start":
            payload = dict(payload, mode="<mode>", persona_name="<persona>")
        elif event.kind == "session_end":
            payload = dict(
                payload,
                utterances=sum(1 for e in included if e.kind == "utterance"),
                charts_generated=sum(1 for e in included if e.kind == "chart_generated"),
            )
        lines.append(
            json.dumps({"t": event.t, "kind": event.kind, "payload": payload}, sort_keys=True, ensure_ascii=False)
        )
    return lines


# -- construction and replay -------------------------------------------------


def build_session(
    cfg: SessionConfig,
    store: Optional[ClimateStore] = None,
    model: Optional[ClassifierModel] = None,
    clock: Optional[Callable[[], float]] = None,
) -> Session:
    store = store or ingest_csv(cfg.dataset_path)
    if model is None:
        if not cfg.checkpoint_path:
            raise ValueError("config needs checkpoint_path (or pass a model)")
        model = load_model(cfg.checkpoint_path)

    refinement_backend = None
    if cfg.refinement_backend.startswith("llm:"):
        entry = cfg.endpoint(cfg.refinement_backend)
        refinement_backend = LlmRefinementBackend(entry["url"], entry["model"])
    refiner = Refiner(cfg.mode, backend=refinement_backend, station_islands=store.station_islands())

    stage_backends = {}
    for stage, ref in cfg.reasoner_backends.items():
        if ref == "fallback":
            continue
        entry = cfg.endpoint(ref)
        stage_backends[stage] = LlmStageBackend(entry["url"], entry["model"])
    reasoner = Reasoner(store, stage_backends or None)

    provider = HashingEmbedder(cfg.embedding_dimension, cfg.embedding_seed)
    return Session(cfg, store, model, provider=provider, refiner=refiner, reasoner=reasoner, clock=clock)


def run_replay(
    cfg: SessionConfig,
    transcript_path: str | Path,
    store: Optional[ClimateStore] = None,
    model: Optional[ClassifierModel] = None,
) -> Session:
    """Feed a transcript file through a fresh session; returns it with the log."""
    session = build_session(cfg, store=store, model=model)
    audio_events = read_replay_file(transcript_path)
    spans = segment_channels(audio_events, cfg.pause_threshold)
    backend = EchoBackend()
    session.start()
    last_t = 0.0
    for span in spans:
        utterance = transcribe(span, backend, session.next_utterance_id)
        if utterance is not None:
            session.handle_utterance(utterance)
            last_t = utterance.t_end
    session.end(t=last_t)
    return session
