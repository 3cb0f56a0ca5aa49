"""Turns timestamped speech events into discrete utterances.

The rule: consecutive events on one speaker channel merge while the silence
between them stays under the pause threshold (default 1.5 s); a gap of at
least the threshold closes the current utterance span. Transcription is a
pluggable backend so the whole pipeline runs without audio; the echo backend
just returns the text payload carried by each event.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Optional, Protocol

logger = logging.getLogger(__name__)

PAUSE_THRESHOLD = 1.5

__all__ = [
    "AudioEvent",
    "Span",
    "Utterance",
    "SegmentationError",
    "TranscriptionBackend",
    "EchoBackend",
    "segment",
    "transcribe",
    "read_replay_file",
    "PAUSE_THRESHOLD",
]


class SegmentationError(ValueError):
    pass


@dataclass(frozen=True)
class AudioEvent:
    start: float
    end: float
    payload: str  # audio reference, or literal text in test/replay mode
    speaker: str = "A"

    def __post_init__(self):
        if not self.end > self.start:
            raise SegmentationError(f"event end {self.end} not after start {self.start}")


@dataclass(frozen=True)
class Span:
    """A maximal run of events separated by silences under the threshold."""

    speaker: str
    t_start: float
    t_end: float
    events: tuple[AudioEvent, ...]


@dataclass(frozen=True)
class Utterance:
    id: int
    speaker: str
    text: str
    t_start: float
    t_end: float
    label: Optional[str] = None


class TranscriptionBackend(Protocol):
    def __call__(self, span: Span) -> str: ...


class EchoBackend:
    """Deterministic test backend: concatenates the events' literal payloads."""

    def __call__(self, span: Span) -> str:
        return " ".join(ev.payload for ev in span.events).strip()


def segment(events: Iterable[AudioEvent], pause_threshold: float = PAUSE_THRESHOLD) -> list[Span]:
    """Split one channel's time-ordered events into utterance spans.

    A gap of exactly ``pause_threshold`` closes the span (>= semantics); a
    trailing open span closes at stream end.
    """
    spans: list[Span] = []
    current: list[AudioEvent] = []
    for ev in events:
        if current:
            prev = current[-1]
            if ev.start < prev.end:
                raise SegmentationError(
                    f"out-of-order events: [{prev.start}, {prev.end}] followed by [{ev.start}, {ev.end}]"
                )
            if ev.start - prev.end >= pause_threshold:
                spans.append(_close(current))
                current = []
        current.append(ev)
    if current:
        spans.append(_close(current))
    return spans


def _close(events: list[AudioEvent]) -> Span:
    return Span(
        speaker=events[0].speaker,
        t_start=events[0].start,
        t_end=events[-1].end,
        events=tuple(events),
    )


def transcribe(
    span: Span,
    backend: TranscriptionBackend,
    next_id: Callable[[], int],
) -> Optional[Utterance]:
    """Run the backend on a span; empty or failed transcriptions yield nothing.

    Backend failures are logged and swallowed so one bad span never kills the
    session. ``next_id`` is only consumed when an utterance is actually
    emitted, which keeps ids gapless over emitted utterances.
    """
    try:
        text = backend(span)
    except Exception:
        logger.warning("transcription backend failed for span %.2f-%.2f, dropping it", span.t_start, span.t_end, exc_info=True)
        return None
    text = text.strip()
    if not text:
        return None
    return Utterance(id=next_id(), speaker=span.speaker, text=text, t_start=span.t_start, t_end=span.t_end)


def read_replay_file(path: str | Path) -> list[AudioEvent]:
    """Parse the replay format: ``speaker<TAB>t_start<TAB>t_end<TAB>text`` per line."""
    events = []
    for line_no, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 4:
            raise SegmentationError(f"replay line {line_no}: expected 4 tab-separated fields, got {len(parts)}")
        speaker, t_start, t_end, text = parts
        try:
            events.append(AudioEvent(start=float(t_start), end=float(t_end), payload=text, speaker=speaker))
        except ValueError as exc:
            raise SegmentationError(f"replay line {line_no}: {exc}") from None
    return events


def segment_channels(
    events: Iterable[AudioEvent], pause_threshold: float = PAUSE_THRESHOLD
) -> list[Span]:
    """Segment a mixed-speaker stream per channel, interleaved by span start.

    Each speaker gets an independent silence timer; the merged timeline is
    ordered by t_start, which is the order history must receive utterances in.
    """
    by_speaker: dict[str, list[AudioEvent]] = {}
    for ev in events:
        by_speaker.setdefault(ev.speaker, []).append(ev)
    spans: list[Span] = []
    for speaker_events in by_speaker.values():
        spans.extend(segment(speaker_events, pause_threshold))
    spans.sort(key=lambda s: (s.t_start, s.speaker))
    return spans
