"""Closed-vocabulary scanning shared by the refiner and the reasoner.

Everything here is token-based over lowercased text, so matches are
word-boundary exact and deterministic. The synonym tables are the whole
mapping surface; nothing fuzzy-matches.
"""

from __future__ import annotations

import re
from enum import Enum
from typing import Optional

from proviz.datastore import Aggregation, Attribute, GroupBy, Island

__all__ = [
    "ChartType",
    "CHART_TYPE_LABELS",
    "ATTRIBUTE_DISPLAY",
    "AGG_DISPLAY",
    "find_attributes",
    "find_islands",
    "find_station_ids",
    "find_aggregation",
    "find_group_by",
    "find_chart_word",
    "has_distribution_intent",
    "has_spread_intent",
]


class ChartType(str, Enum):
    LINE = "line"
    BAR = "bar"
    SCATTER = "scatter"
    HISTOGRAM = "histogram"
    BOXPLOT = "boxplot"


CHART_TYPE_LABELS = {
    ChartType.LINE: "line chart",
    ChartType.BAR: "bar chart",
    ChartType.SCATTER: "scatter plot",
    ChartType.HISTOGRAM: "histogram",
    ChartType.BOXPLOT: "box plot",
}

ATTRIBUTE_DISPLAY = {
    Attribute.RAINFALL: "rainfall",
    Attribute.TEMPERATURE: "temperature",
    Attribute.SOIL_MOISTURE: "soil moisture",
    Attribute.SOLAR: "solar",
    Attribute.WIND_SPEED: "wind speed",
}

# token (or "first second" bigram) -> attribute
_ATTRIBUTE_SYNONYMS = {
    "rainfall": Attribute.RAINFALL,
    "rain": Attribute.RAINFALL,
    "precipitation": Attribute.RAINFALL,
    "temperature": Attribute.TEMPERATURE,
    "temperatures": Attribute.TEMPERATURE,
    "temp": Attribute.TEMPERATURE,
    "heat": Attribute.TEMPERATURE,
    "soil": Attribute.SOIL_MOISTURE,
    "moisture": Attribute.SOIL_MOISTURE,
    "solar": Attribute.SOLAR,
    "sun": Attribute.SOLAR,
    "sunshine": Attribute.SOLAR,
    "sunlight": Attribute.SOLAR,
    "wind": Attribute.WIND_SPEED,
    "windy": Attribute.WIND_SPEED,
}

_ISLAND_TOKENS = {island.value.lower(): island for island in Island}

_AGG_WORDS = {
    "highest": Aggregation.MAX,
    "most": Aggregation.MAX,
    "max": Aggregation.MAX,
    "maximum": Aggregation.MAX,
    "lowest": Aggregation.MIN,
    "least": Aggregation.MIN,
    "min": Aggregation.MIN,
    "minimum": Aggregation.MIN,
    "average": Aggregation.MEAN,
    "mean": Aggregation.MEAN,
    "total": Aggregation.SUM,
    "sum": Aggregation.SUM,
}

AGG_DISPLAY = {
    Aggregation.MAX: "highest",
    Aggregation.MIN: "lowest",
    Aggregation.MEAN: "average",
    Aggregation.SUM: "total",
}

_GROUP_TARGETS = {
    "station": GroupBy.STATION,
    "stations": GroupBy.STATION,
    "island": GroupBy.ISLAND,
    "islands": GroupBy.ISLAND,
    "month": GroupBy.MONTH,
    "months": GroupBy.MONTH,
}

_CHART_WORDS = {
    "line": ChartType.LINE,
    "bar": ChartType.BAR,
    "bars": ChartType.BAR,
    "scatter": ChartType.SCATTER,
    "scatterplot": ChartType.SCATTER,
    "histogram": ChartType.HISTOGRAM,
    "boxplot": ChartType.BOXPLOT,
    "box plot": ChartType.BOXPLOT,
}

_TOKEN = re.compile(r"[a-z0-9']+")
_STATION_REF = re.compile(r"\bstations?\s+(\d+(?:\s*(?:,|and|&)\s*\d+)*)", re.IGNORECASE)


def _tokens(text: str) -> list[str]:
    return _TOKEN.findall(text.lower())


def find_attributes(text: str) -> list[Attribute]:
    """Attributes in first-mention order, deduplicated."""
    found: list[Attribute] = []
    for token in _tokens(text):
        attr = _ATTRIBUTE_SYNONYMS.get(token)
        if attr is not None and attr not in found:
            found.append(attr)
    return found


def find_islands(text: str) -> list[Island]:
    toks = _tokens(text)
    found: list[Island] = []
    for i, token in enumerate(toks):
        island = _ISLAND_TOKENS.get(token)
        if island is None and token == "big" and i + 1 < len(toks) and toks[i + 1] == "island":
            island = Island.HAWAII
        if island is not None and island not in found:
            found.append(island)
    return found


def find_station_ids(text: str) -> list[str]:
    """Ids from "station 4" / "stations 4, 5 and 7" references, in order."""
    found: list[str] = []
    for match in _STATION_REF.finditer(text):
        for sid in re.findall(r"\d+", match.group(1)):
            if sid not in found:
                found.append(sid)
    return found


def find_aggregation(text: str) -> tuple[Optional[Aggregation], Optional[str]]:
    """First aggregation cue and the word that triggered it."""
    for token in _tokens(text):
        agg = _AGG_WORDS.get(token)
        if agg is not None:
            return agg, token
    return None, None


_GROUP_SKIP = {"the", "a", "an", "all"} | set(_ISLAND_TOKENS)


def find_group_by(text: str) -> Optional[GroupBy]:
    """Explicit grouping cue: "per island", "by station", "across the Maui stations"."""
    toks = _tokens(text)
    for i, token in enumerate(toks):
        if token in ("per", "by", "across", "each", "every"):
            for nxt in toks[i + 1 : i + 5]:
                target = _GROUP_TARGETS.get(nxt)
                if target is not None:
                    return target
                if nxt not in _GROUP_SKIP and not nxt.isdigit():
                    break
        if token == "monthly":
            return GroupBy.MONTH
    return None


def find_chart_word(text: str) -> Optional[ChartType]:
    """Explicit chart-type request, which overrides the selection rules."""
    toks = _tokens(text)
    for i, token in enumerate(toks):
        if token == "box" and i + 1 < len(toks) and toks[i + 1] in ("plot", "plots"):
            return ChartType.BOXPLOT
        chart = _CHART_WORDS.get(token)
        if chart is not None:
            # bare "line"/"bar" only counts next to a chart noun ("line chart")
            if token in ("line", "bar", "bars"):
                nxt = toks[i + 1] if i + 1 < len(toks) else ""
                if nxt not in ("chart", "charts", "graph", "graphs", "plot", "plots"):
                    continue
            return chart
    return None


def has_distribution_intent(text: str) -> bool:
    return any(t in ("distribution", "histogram") for t in _tokens(text))


def has_spread_intent(text: str) -> bool:
    return any(t in ("variability", "variance", "quartile", "quartiles") for t in _tokens(text))
