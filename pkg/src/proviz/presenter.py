"""Executes a chart plan against the store and emits a renderable spec.

The spec document is renderer-agnostic JSON: series of (x, y) points for
line/bar/scatter, equal-width bins for histograms, five-number boxes for
box plots (Tukey hinges: with an odd count the median belongs to both
halves). The accompanying summary is at most two sentences and is built
from the plan's reasoning unless a language-model backend is supplied.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from typing import Callable, Optional

from proviz.datastore import (
    ATTRIBUTE_UNITS,
    Aggregation,
    Attribute,
    ClimateStore,
    DataQuery,
    GroupBy,
    Row,
    station_sort_key,
)
from proviz.history import normalize_title
from proviz.reasoner import ChartPlan, scope_phrase
from proviz.vocab import AGG_DISPLAY, ATTRIBUTE_DISPLAY, CHART_TYPE_LABELS, ChartType

logger = logging.getLogger(__name__)

__all__ = ["ChartSpec", "render_plan", "summarize", "five_number_summary", "histogram_bins"]

MAX_HISTOGRAM_BINS = 30


@dataclass(frozen=True)
class ChartSpec:
    spec_id: str
    chart_type: ChartType
    title: str
    x_axis: dict
    y_axis: dict
    series: tuple = ()
    bins: tuple = ()
    boxes: tuple = ()
    origin: str = "explicit"
    summary: str = ""
    empty: bool = False

    @property
    def dedupe_key(self) -> str:
        return normalize_title(self.title)

    def to_dict(self) -> dict:
        series = []
        for s in self.series:
            entry = dict(s)
            entry["points"] = [list(p) for p in entry["points"]]
            series.append(entry)
        return {
            "spec_id": self.spec_id,
            "chart_type": self.chart_type.value,
            "title": self.title,
            "dedupe_key": self.dedupe_key,
            "origin": self.origin,
            "summary": self.summary,
            "empty": self.empty,
            "x_axis": self.x_axis,
            "y_axis": self.y_axis,
            "series": series,
            "bins": [dict(b) for b in self.bins],
            "boxes": [dict(b) for b in self.boxes],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, ensure_ascii=False)


def _median(sorted_values: list[float]) -> float:
    n = len(sorted_values)
    mid = n // 2
    if n % 2:
        return sorted_values[mid]
    return (sorted_values[mid - 1] + sorted_values[mid]) / 2.0


def five_number_summary(values: list[float]) -> tuple[float, float, float, float, float]:
    """(min, lower hinge, median, upper hinge, max) per Tukey's convention."""
    if not values:
        raise ValueError("five-number summary of an empty group")
    vs = sorted(values)
    n = len(vs)
    half = (n + 1) // 2
    return vs[0], _median(vs[:half]), _median(vs), _median(vs[n - half :]), vs[-1]


def histogram_bins(values: list[float]) -> list[dict]:
    """Equal-width bins, ceil(sqrt(N)) of them capped at 30; last edge inclusive."""
    n = len(values)
    lo, hi = min(values), max(values)
    if lo == hi:
        return [{"lo": lo, "hi": hi, "count": n}]
    count = min(MAX_HISTOGRAM_BINS, int(n**0.5) + (0 if (n**0.5).is_integer() else 1))
    width = (hi - lo) / count
    bins = [{"lo": lo + i * width, "hi": lo + (i + 1) * width, "count": 0} for i in range(count)]
    for v in values:
        idx = min(int((v - lo) / width), count - 1)
        bins[idx]["count"] += 1
    return bins


def _group_label(row_key: str, group_by: Optional[GroupBy]) -> str:
    if group_by in (None, GroupBy.STATION):
        return f"station {row_key}"
    return row_key


def _raw_rows(plan: ChartPlan, store: ClimateStore, attributes) -> list[Row]:
    query = DataQuery(
        attributes=frozenset(attributes),
        stations=plan.stations,
        date_range=plan.date_range,
    )
    return list(store.fetch(query).rows)


def render_plan(plan: ChartPlan, store: ClimateStore, spec_id: str, origin: str = "explicit") -> ChartSpec:
    """Fetch, transform, and shape the plan's data into a chart spec."""
    attr = plan.attributes[0]
    attr_name = ATTRIBUTE_DISPLAY[attr]
    units = ATTRIBUTE_UNITS[attr]
    base = dict(
        spec_id=spec_id,
        chart_type=plan.chart_type,
        title=plan.title,
        origin=origin,
    )

    if plan.chart_type is ChartType.SCATTER:
        spec = _render_scatter(plan, store, base)
    elif plan.chart_type is ChartType.HISTOGRAM:
        rows = _raw_rows(plan, store, [attr])
        if rows:
            spec = ChartSpec(
                **base,
                x_axis={"label": f"{attr_name} ({units})", "kind": "quantitative"},
                y_axis={"label": "count", "units": "count"},
                bins=tuple(_freeze(histogram_bins([r.value for r in rows]))),
            )
        else:
            spec = _empty_spec(base, attr_name, units)
    elif plan.chart_type is ChartType.BOXPLOT:
        spec = _render_boxplot(plan, store, base, attr, attr_name, units)
    elif plan.chart_type is ChartType.BAR or (
        plan.chart_type is ChartType.LINE and plan.transform.aggregation is not Aggregation.NONE
    ):
        spec = _render_aggregated(plan, store, base, attr, attr_name, units)
    else:
        spec = _render_line(plan, store, base, attr, attr_name, units)
    return spec


def _freeze(dicts: list[dict]) -> list[tuple]:
    return [tuple(d.items()) for d in dicts]


def _empty_spec(base: dict, x_label: str, units: str) -> ChartSpec:
    return ChartSpec(
        **base,
        x_axis={"label": x_label, "kind": "categorical"},
        y_axis={"label": x_label, "units": units},
        series=(),
        empty=True,
    )


def _render_line(plan: ChartPlan, store: ClimateStore, base: dict, attr: Attribute, attr_name: str, units: str) -> ChartSpec:
    rows = _raw_rows(plan, store, [attr])
    if not rows:
        return _empty_spec(base, "date", units)
    by_station: dict[str, list] = {}
    for r in rows:
        by_station.setdefault(r.key, []).append((r.day.isoformat(), r.value))
    series = tuple(
        (("name", f"station {sid}"), ("points", tuple(sorted(by_station[sid]))))
        for sid in sorted(by_station, key=station_sort_key)
    )
    return ChartSpec(
        **base,
        x_axis={"label": "date", "kind": "temporal"},
        y_axis={"label": attr_name, "units": units},
        series=series,
    )


def _render_aggregated(plan: ChartPlan, store: ClimateStore, base: dict, attr: Attribute, attr_name: str, units: str) -> ChartSpec:
    # A bar plan may arrive without an aggregation (explicit "bar" override):
    # default to mean per station so the chart stays well-defined.
    agg = plan.transform.aggregation
    group = plan.transform.group_by
    if agg is Aggregation.NONE:
        agg = Aggregation.MEAN
    if group is None:
        group = GroupBy.STATION
    query = DataQuery(
        attributes=frozenset([attr]),
        stations=plan.stations,
        date_range=plan.date_range,
        aggregation=agg,
        group_by=group,
    )
    rows = store.fetch(query).rows
    if not rows:
        return _empty_spec(base, group.value, units)
    points = tuple((_group_label(r.key, group), r.value) for r in rows)
    series = ((("name", f"{AGG_DISPLAY[agg]} {attr_name}"), ("points", points)),)
    return ChartSpec(
        **base,
        x_axis={"label": group.value, "kind": "categorical"},
        y_axis={"label": f"{AGG_DISPLAY[agg]} {attr_name}", "units": units},
        series=series,
    )


def _render_scatter(plan: ChartPlan, store: ClimateStore, base: dict) -> ChartSpec:
    ax, ay = plan.attributes
    rows = _raw_rows(plan, store, [ax, ay])
    by_key: dict[tuple[str, object], dict[Attribute, float]] = {}
    for r in rows:
        by_key.setdefault((r.key, r.day), {})[r.attribute] = r.value
    by_station: dict[str, list] = {}
    for (sid, day), vals in sorted(by_key.items(), key=lambda kv: (station_sort_key(kv[0][0]), kv[0][1])):
        if ax in vals and ay in vals:  # inner join on (station, date)
            by_station.setdefault(sid, []).append((vals[ax], vals[ay]))
    if not by_station:
        return _empty_spec(base, ATTRIBUTE_DISPLAY[ax], ATTRIBUTE_UNITS[ay])
    series = tuple(
        (("name", f"station {sid}"), ("points", tuple(pts)))
        for sid, pts in sorted(by_station.items(), key=lambda kv: station_sort_key(kv[0]))
    )
    return ChartSpec(
        **base,
        x_axis={"label": f"{ATTRIBUTE_DISPLAY[ax]} ({ATTRIBUTE_UNITS[ax]})", "kind": "quantitative"},
        y_axis={"label": ATTRIBUTE_DISPLAY[ay], "units": ATTRIBUTE_UNITS[ay]},
        series=series,
    )


def _render_boxplot(plan: ChartPlan, store: ClimateStore, base: dict, attr: Attribute, attr_name: str, units: str) -> ChartSpec:
    rows = _raw_rows(plan, store, [attr])
    if not rows:
        return _empty_spec(base, "group", units)
    group = plan.transform.group_by or GroupBy.STATION
    grouped: dict[str, list[float]] = {}
    for r in rows:
        if group is GroupBy.STATION:
            key = r.key
        elif group is GroupBy.ISLAND:
            key = store.stations[r.key].island.value
        else:
            key = f"{r.day.year:04d}-{r.day.month:02d}"
        grouped.setdefault(key, []).append(r.value)
    boxes = []
    for key in sorted(grouped, key=station_sort_key if group is GroupBy.STATION else str):
        lo, q1, med, q3, hi = five_number_summary(grouped[key])
        boxes.append(
            (
                ("name", _group_label(key, group)),
                ("min", lo),
                ("q1", q1),
                ("median", med),
                ("q3", q3),
                ("max", hi),
                ("count", len(grouped[key])),
            )
        )
    return ChartSpec(
        **base,
        x_axis={"label": group.value, "kind": "categorical"},
        y_axis={"label": attr_name, "units": units},
        boxes=tuple(boxes),
    )


# -- summaries --------------------------------------------------------------

SummaryBackend = Callable[[ChartPlan, ChartSpec], str]


def _scope_for_summary(plan: ChartPlan, store: ClimateStore) -> str:
    phrase = scope_phrase(plan.stations, store)
    if phrase.endswith("stations") and not phrase.startswith(("all", "station")):
        return f"the {phrase}"
    return phrase


def _template_summary(plan: ChartPlan, spec: ChartSpec, store: ClimateStore) -> str:
    if spec.empty:
        return "I found no matching data for the request."
    attr_phrase = " and ".join(ATTRIBUTE_DISPLAY[a] for a in plan.attributes)
    first = f"I created a {CHART_TYPE_LABELS[plan.chart_type]} of {attr_phrase} for {_scope_for_summary(plan, store)}."
    return f"{first} {plan.reasoning['chart_type']}"


def _clip_sentences(text: str, limit: int = 2) -> str:
    parts = [p.strip() for p in text.replace("!", ".").replace("?", ".").split(".") if p.strip()]
    return ". ".join(parts[:limit]) + "."


def summarize(plan: ChartPlan, spec: ChartSpec, store: ClimateStore, backend: Optional[SummaryBackend] = None) -> str:
    """At most two sentences naming the chart type, attributes, and scope."""
    if backend is not None:
        try:
            text = backend(plan, spec).strip()
            if text:
                return _clip_sentences(text)
        except Exception:
            logger.warning("summary backend failed; using template summary", exc_info=True)
    return _template_summary(plan, spec, store)
