"""Bounded conversational and chart-interaction context.

Three five-slot windows (dialogue, generated charts, selected charts) plus
the last selected chart. Chart identity is the normalized title, which is
also the dedupe key used to suppress redundant proactive generations.
"""

from __future__ import annotations

import hashlib
import re
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from proviz.segmenter import Utterance

WINDOW_SIZE = 5

__all__ = [
    "ClassLabel",
    "ChartEvent",
    "ContextHistory",
    "ContextDocument",
    "normalize_title",
    "WINDOW_SIZE",
]


class ClassLabel(str, Enum):
    PROACTIVE = "ProactiveOpportunity"
    EXPLICIT = "ExplicitQuery"
    NON_QUERY = "NonQuery"


_PUNCT = re.compile(r"[^\w\s]", re.UNICODE)


def normalize_title(title: str) -> str:
    """Lowercase, strip punctuation, collapse whitespace. Idempotent."""
    return " ".join(_PUNCT.sub(" ", title.lower()).split())


@dataclass(frozen=True)
class ChartEvent:
    kind: str  # "generated" | "selected"
    chart_title: str
    timestamp: float

    def __post_init__(self):
        if self.kind not in ("generated", "selected"):
            raise ValueError(f"bad chart event kind {self.kind!r}")

    @property
    def dedupe_key(self) -> str:
        return normalize_title(self.chart_title)


@dataclass
class ContextHistory:
    dialogue: deque[Utterance] = field(default_factory=lambda: deque(maxlen=WINDOW_SIZE))
    generated: deque[ChartEvent] = field(default_factory=lambda: deque(maxlen=WINDOW_SIZE))
    selected: deque[ChartEvent] = field(default_factory=lambda: deque(maxlen=WINDOW_SIZE))

    def push_utterance(self, u: Utterance) -> None:
        if not u.text.strip():
            raise ValueError("empty utterances never reach history")
        self.dialogue.append(u)

    def record_chart(self, event: ChartEvent) -> None:
        if event.kind == "generated":
            self.generated.append(event)
        else:
            self.selected.append(event)

    @property
    def last_selected(self) -> Optional[ChartEvent]:
        return self.selected[-1] if self.selected else None

    def generated_keys(self) -> set[str]:
        return {e.dedupe_key for e in self.generated}

    def known_keys(self) -> set[str]:
        return {e.dedupe_key for e in self.generated} | {e.dedupe_key for e in self.selected}

    def snapshot(self) -> "ContextDocument":
        return ContextDocument(
            dialogue=tuple((u.id, u.speaker, u.text) for u in self.dialogue),
            generated_titles=tuple(e.chart_title for e in self.generated),
            selected_titles=tuple(e.chart_title for e in self.selected),
            last_selected=self.last_selected.chart_title if self.last_selected else None,
        )


@dataclass(frozen=True)
class ContextDocument:
    """Immutable rendering of the history, safe to hand to worker threads."""

    dialogue: tuple[tuple[int, str, str], ...]
    generated_titles: tuple[str, ...]
    selected_titles: tuple[str, ...]
    last_selected: Optional[str]

    @property
    def text(self) -> str:
        """Deterministic text form, embedded in prompts and the event log."""
        lines = ["[dialogue]"]
        lines += [f"{uid} {speaker}: {text}" for uid, speaker, text in self.dialogue]
        lines.append("[generated charts]")
        lines += list(self.generated_titles)
        lines.append("[selected charts]")
        lines += list(self.selected_titles)
        lines.append(f"last_selected: {self.last_selected if self.last_selected is not None else 'none'}")
        return "\n".join(lines)

    @property
    def digest(self) -> str:
        return hashlib.sha256(self.text.encode("utf-8")).hexdigest()[:16]
