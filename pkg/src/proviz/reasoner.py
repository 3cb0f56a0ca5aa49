"""Staged chart reasoner: refined query -> fully specified chart plan.

Four stages, each producing a value from a closed vocabulary plus a
one-sentence justification: attribute extraction, station extraction, and
transformation selection are independent of each other (they commute, and
may run in any order); chart-type selection runs last because its rules
depend on the attribute count and transform. Each stage is backed either by
the deterministic rule tables below or by a remote model that must answer
within the same closed vocabulary.
"""

from __future__ import annotations

import json
import urllib.request
from dataclasses import dataclass, field
from datetime import date
from typing import Callable, Optional, Protocol

from proviz.datastore import Aggregation, Attribute, ClimateStore, GroupBy, Island, station_sort_key
from proviz.refiner import RefinedQuery
from proviz.vocab import (
    AGG_DISPLAY,
    ATTRIBUTE_DISPLAY,
    CHART_TYPE_LABELS,
    ChartType,
    find_aggregation,
    find_attributes,
    find_chart_word,
    find_group_by,
    find_islands,
    find_station_ids,
    has_distribution_intent,
    has_spread_intent,
)

__all__ = [
    "Transform",
    "ChartPlan",
    "StageError",
    "Reasoner",
    "FallbackStageBackend",
    "LlmStageBackend",
    "extract_attributes",
    "extract_stations",
    "select_transform",
    "select_chart_type",
    "plan",
    "STAGES",
    "INDEPENDENT_STAGES",
]

INDEPENDENT_STAGES = ("attributes", "stations", "transform")
STAGES = INDEPENDENT_STAGES + ("chart_type",)

LINE_REASON = "I chose a line chart to show change over the full date range."


class StageError(ValueError):
    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


@dataclass(frozen=True)
class Transform:
    aggregation: Aggregation = Aggregation.NONE
    group_by: Optional[GroupBy] = None
    filter: Optional[str] = None  # reserved for LLM backends; no fallback rule emits one


@dataclass(frozen=True)
class ChartPlan:
    attributes: tuple[Attribute, ...]
    stations: frozenset[str]
    date_range: tuple[date, date]
    transform: Transform
    chart_type: ChartType
    reasoning: dict[str, str] = field(hash=False)
    title: str = ""

    def __post_init__(self):
        required = 2 if self.chart_type is ChartType.SCATTER else 1
        if len(self.attributes) != required:
            raise StageError(
                "chart_type",
                f"a {CHART_TYPE_LABELS[self.chart_type]} needs exactly {required} "
                f"attribute(s); plan has {len(self.attributes)}",
            )
        if not self.stations:
            raise StageError("stations", "plan has no stations")


# -- deterministic stage rules ------------------------------------------


def extract_attributes(q: RefinedQuery, schema: list[Attribute]) -> tuple[tuple[Attribute, ...], str]:
    found = [a for a in find_attributes(q.text) if a in schema]
    if not found:
        raise StageError("attributes", f"no dataset attribute recognized in {q.text!r}")
    names = [ATTRIBUTE_DISPLAY[a] for a in found[:2]]
    if len(found) > 2:
        reason = f"The request mentions {names[0]} and {names[1]}; additional attributes were dropped."
    elif len(found) == 2:
        reason = f"The request mentions {names[0]} and {names[1]}."
    else:
        reason = f"The request mentions {names[0]}."
    return tuple(found[:2]), reason


def extract_stations(q: RefinedQuery, store: ClimateStore) -> tuple[frozenset[str], str]:
    islands = find_islands(q.text)
    sids = find_station_ids(q.text)
    missing = [sid for sid in sids if sid not in store.stations]
    if missing:
        raise StageError("stations", f"unknown station ids: {', '.join(missing)}")

    # Specific station ids win; an island next to them ("station 4 on Oahu")
    # is description, not scope.
    if sids:
        return frozenset(sids), "The request names station " + " and ".join(sids) + "."
    if islands:
        chosen: set[str] = set()
        parts = []
        for island in islands:
            ids = store.resolve_island(island.value)
            chosen |= ids
            parts.append(f"{island.value}, which has {len(ids)} stations")
        return frozenset(chosen), f"The request names {'; '.join(parts)}."
    return frozenset(store.stations), "No location was named, so all stations are included."


def select_transform(q: RefinedQuery) -> tuple[Transform, str]:
    text = q.text
    agg, word = find_aggregation(text)
    group = find_group_by(text)
    comparing = any(t in text.lower().split() for t in ("compare", "compared", "comparison"))

    if group is None and (agg is not None or comparing):
        # superlatives and comparisons rank the stations against each other
        group = GroupBy.STATION

    if agg is None and group is None:
        return Transform(), "No aggregation words were found, so raw values are used."
    if agg is None:
        return Transform(group_by=group), f"Values are grouped by {group.value} with no aggregation."
    reason = f"The word '{word}' selects the {AGG_DISPLAY[agg]} value per {group.value}."
    return Transform(aggregation=agg, group_by=group), reason


def select_chart_type(
    attributes: tuple[Attribute, ...], transform: Transform, q: RefinedQuery
) -> tuple[ChartType, str]:
    names = [ATTRIBUTE_DISPLAY[a] for a in attributes]
    override = find_chart_word(q.text)
    if override is not None:
        required = 2 if override is ChartType.SCATTER else 1
        if len(attributes) != required:
            raise StageError(
                "chart_type",
                f"a {CHART_TYPE_LABELS[override]} needs exactly {required} attribute(s); "
                f"the request resolves to {len(attributes)}",
            )
        return override, f"I chose a {CHART_TYPE_LABELS[override]} because the request asked for one."

    if len(attributes) == 2:
        return ChartType.SCATTER, f"I chose a scatter plot to relate {names[0]} and {names[1]}."
    if has_distribution_intent(q.text):
        return ChartType.HISTOGRAM, f"I chose a histogram to show the distribution of {names[0]}."
    if transform.group_by is not None and transform.aggregation is not Aggregation.NONE:
        return (
            ChartType.BAR,
            f"I chose a bar chart to compare the {AGG_DISPLAY[transform.aggregation]} "
            f"{names[0]} by {transform.group_by.value}.",
        )
    if has_spread_intent(q.text):
        return ChartType.BOXPLOT, f"I chose a box plot to show the spread of {names[0]}."
    return ChartType.LINE, LINE_REASON


# -- backends -------------------------------------------------------------


class StageBackend(Protocol):
    def __call__(self, stage: str, q: RefinedQuery, store: ClimateStore, prior: dict) -> tuple[object, str]: ...


class FallbackStageBackend:
    """Routes every stage to the deterministic rule tables above."""

    def __call__(self, stage: str, q: RefinedQuery, store: ClimateStore, prior: dict) -> tuple[object, str]:
        if stage == "attributes":
            return extract_attributes(q, list(Attribute))
        if stage == "stations":
            return extract_stations(q, store)
        if stage == "transform":
            return select_transform(q)
        if stage == "chart_type":
            return select_chart_type(prior["attributes"], prior["transform"], q)
        raise StageError(stage, "unknown stage")


class LlmStageBackend:
    """Remote per-stage resolver; answers outside the closed vocabulary fail the stage."""

    def __init__(self, endpoint: str, model: str, transport: Optional[Callable[[str, bytes], bytes]] = None, timeout: float = 10.0):
        self.endpoint = endpoint
        self.model = model
        self.timeout = timeout
        self._transport = transport or self._http_post

    def _http_post(self, url: str, body: bytes) -> bytes:
        req = urllib.request.Request(url, data=body, headers={"Content-Type": "application/json"})
        with urllib.request.urlopen(req, timeout=self.timeout) as resp:
            return resp.read()

    def __call__(self, stage: str, q: RefinedQuery, store: ClimateStore, prior: dict) -> tuple[object, str]:
        schema = {
            "attributes": [a.value for a in Attribute],
            "islands": [i.value for i in Island],
            "station_ids": sorted(store.stations, key=station_sort_key),
        }
        payload = {
            "model": self.model,
            "stage": stage,
            "query": q.text,
            "schema": schema,
            "prior": _encode_prior(prior),
        }
        try:
            reply = json.loads(self._transport(self.endpoint, json.dumps(payload).encode("utf-8")))
            value, reason = reply["value"], str(reply.get("reasoning", ""))
        except Exception as exc:
            raise StageError(stage, f"backend call failed: {exc}") from None
        return _decode_stage_value(stage, value, store), reason or f"Chosen by {self.model}."


def _encode_prior(prior: dict) -> dict:
    out: dict = {}
    if "attributes" in prior:
        out["attributes"] = [a.value for a in prior["attributes"]]
    if "transform" in prior:
        t: Transform = prior["transform"]
        out["transform"] = {
            "aggregation": t.aggregation.value,
            "group_by": t.group_by.value if t.group_by else None,
        }
    if "stations" in prior:
        out["stations"] = sorted(prior["stations"], key=station_sort_key)
    return out


def _decode_stage_value(stage: str, value: object, store: ClimateStore) -> object:
    try:
        if stage == "attributes":
            attrs = tuple(Attribute(v) for v in value)  # type: ignore[union-attr]
            if not 1 <= len(attrs) <= 2:
                raise ValueError(f"need 1-2 attributes, got {len(attrs)}")
            return attrs
        if stage == "stations":
            ids = frozenset(str(v) for v in value)  # type: ignore[union-attr]
            unknown = ids - store.stations.keys()
            if not ids or unknown:
                raise ValueError(f"empty or unknown station ids {sorted(unknown)}")
            return ids
        if stage == "transform":
            agg = Aggregation(value.get("aggregation", "none"))  # type: ignore[union-attr]
            group_raw = value.get("group_by")  # type: ignore[union-attr]
            return Transform(aggregation=agg, group_by=GroupBy(group_raw) if group_raw else None)
        if stage == "chart_type":
            return ChartType(value)
    except (ValueError, TypeError, AttributeError) as exc:
        raise StageError(stage, f"backend answer {value!r} outside the closed vocabulary: {exc}") from None
    raise StageError(stage, "unknown stage")


# -- plan assembly ---------------------------------------------------------


def scope_phrase(stations: frozenset[str], store: ClimateStore) -> str:
    """Deterministic scope rendering used in titles and summaries."""
    if stations == frozenset(store.stations):
        return "all stations"
    for island in Island:
        if stations and stations == store.resolve_island(island.value):
            return f"{island.value} stations"
    ordered = sorted(stations, key=station_sort_key)
    if len(ordered) == 1:
        return f"station {ordered[0]}"
    return "stations " + ", ".join(ordered)


def transform_phrase(t: Transform) -> str:
    if t.aggregation is Aggregation.NONE:
        return "raw" if t.group_by is None else f"by {t.group_by.value}"
    if t.group_by is None:
        return t.aggregation.value
    return f"{t.aggregation.value} by {t.group_by.value}"


def make_title(chart_type: ChartType, attributes: tuple[Attribute, ...], stations: frozenset[str], transform: Transform, store: ClimateStore) -> str:
    attr_phrase = " and ".join(ATTRIBUTE_DISPLAY[a] for a in attributes)
    return (
        f"{CHART_TYPE_LABELS[chart_type]} of {attr_phrase} — "
        f"{scope_phrase(stations, store)} — {transform_phrase(transform)}"
    )


class Reasoner:
    def __init__(self, store: ClimateStore, backends: Optional[dict[str, StageBackend]] = None):
        self.store = store
        fallback = FallbackStageBackend()
        self.backends: dict[str, StageBackend] = {stage: fallback for stage in STAGES}
        if backends:
            unknown = set(backends) - set(STAGES)
            if unknown:
                raise ValueError(f"unknown reasoner stages {sorted(unknown)}")
            self.backends.update(backends)

    def plan(self, q: RefinedQuery, stage_order: tuple[str, ...] = INDEPENDENT_STAGES) -> ChartPlan:
        if sorted(stage_order) != sorted(INDEPENDENT_STAGES):
            raise ValueError(f"stage_order must permute {INDEPENDENT_STAGES}")
        results: dict[str, object] = {}
        reasoning: dict[str, str] = {}
        for stage in stage_order:
            value, reason = self.backends[stage](stage, q, self.store, {})
            results[stage] = value
            reasoning[stage] = reason

        chart_type, chart_reason = self.backends["chart_type"]("chart_type", q, self.store, results)
        reasoning["chart_type"] = chart_reason

        attributes: tuple[Attribute, ...] = results["attributes"]  # type: ignore[assignment]
        stations: frozenset[str] = results["stations"]  # type: ignore[assignment]
        transform: Transform = results["transform"]  # type: ignore[assignment]
        return ChartPlan(
            attributes=attributes,
            stations=stations,
            date_range=self.store.window,
            transform=transform,
            chart_type=chart_type,  # type: ignore[arg-type]
            reasoning={stage: reasoning[stage] for stage in STAGES},
            title=make_title(chart_type, attributes, stations, transform, self.store),  # type: ignore[arg-type]
        )


def plan(q: RefinedQuery, store: ClimateStore, backend: Optional[dict[str, StageBackend]] = None) -> ChartPlan:
    return Reasoner(store, backend).plan(q)
