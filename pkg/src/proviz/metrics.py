"""Replay metrics over a session event log.

Mirrors the study's measurements: every transcribed utterance counts once;
keyword totals use the fixed task-relevant list with case-insensitive,
whole-word matching ("solar energy" counts via its "solar" token; plural
forms are distinct words and do not count); the delta of the first explicit
request is the time from the first utterance to the first explicit-origin
chart, formatted m:ss.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from proviz.session import SessionEvent

__all__ = ["KEYWORDS", "MetricsReport", "compute_metrics", "format_delta"]

# Dataset variables plus task-related words, exactly the study's list.
KEYWORDS = (
    "temperature",
    "wind",
    "rainfall",
    "solar",
    "soil",
    "station",
    "fire",
    "drought",
    "farm",
    "agriculture",
)


@dataclass
class MetricsReport:
    total_utterances: int = 0
    keyword_counts: dict[str, int] = field(default_factory=dict)
    keyword_total: int = 0
    charts_generated: int = 0
    charts_selected: int = 0
    explicit_charts: int = 0
    proactive_charts: int = 0
    suppressions: int = 0
    errors: int = 0
    delta_first_explicit: Optional[str] = None  # "m:ss" or None if no explicit chart

    def to_dict(self) -> dict:
        return {
            "total_utterances": self.total_utterances,
            "keyword_counts": dict(self.keyword_counts),
            "keyword_total": self.keyword_total,
            "charts_generated": self.charts_generated,
            "charts_selected": self.charts_selected,
            "explicit_charts": self.explicit_charts,
            "proactive_charts": self.proactive_charts,
            "suppressions": self.suppressions,
            "errors": self.errors,
            "delta_first_explicit": self.delta_first_explicit,
        }


def format_delta(seconds: float) -> str:
    whole = int(seconds)
    return f"{whole // 60}:{whole % 60:02d}"


def count_keywords(texts: Iterable[str], keywords: Sequence[str] = KEYWORDS) -> dict[str, int]:
    patterns = {kw: re.compile(rf"\b{re.escape(kw)}\b") for kw in keywords}
    counts = {kw: 0 for kw in keywords}
    for text in texts:
        lowered = text.lower()
        for kw, pattern in patterns.items():
            counts[kw] += len(pattern.findall(lowered))
    return counts


def compute_metrics(events: list[SessionEvent], keywords: Sequence[str] = KEYWORDS) -> MetricsReport:
    report = MetricsReport(keyword_counts={kw: 0 for kw in keywords})
    first_utterance_t: Optional[float] = None
    first_explicit_chart_t: Optional[float] = None
    texts = []

    for event in events:
        if event.kind == "utterance":
            report.total_utterances += 1
            texts.append(event.payload["text"])
            if first_utterance_t is None:
                first_utterance_t = event.t
        elif event.kind == "chart_generated":
            report.charts_generated += 1
            if event.payload.get("origin") == "proactive":
                report.proactive_charts += 1
            else:
                report.explicit_charts += 1
                if first_explicit_chart_t is None:
                    first_explicit_chart_t = event.t
        elif event.kind == "chart_selected":
            report.charts_selected += 1
        elif event.kind == "suppression":
            report.suppressions += 1
        elif event.kind == "error":
            report.errors += 1

    report.keyword_counts = count_keywords(texts, keywords)
    report.keyword_total = sum(report.keyword_counts.values())
    if first_utterance_t is not None and first_explicit_chart_t is not None:
        report.delta_first_explicit = format_delta(first_explicit_chart_t - first_utterance_t)
    return report
