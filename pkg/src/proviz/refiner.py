"""Label dispatch and context-aware query rewriting.

The refiner turns a classified utterance into a self-contained chart
request. Explicit queries are served in both assistant modes; proactive
opportunities only in proactive mode; non-queries do nothing.

Deterministic fallback rule table (also the behavior on LLM backend
failure):

1. An utterance that already names a dataset attribute passes through
   unchanged.
2. Otherwise pronouns/ellipsis resolve against the dialogue window, newest
   mention first: the most recent attribute and the most recent region
   (island preferred over a single station inside one utterance) fill a
   "Show ... for ..." template, keeping any chart-type or aggregation word
   from the triggering utterance.
3. A discovery (proactive origin) becomes a comparison of its attribute
   across the enclosing island's stations, reusing the discovery's
   aggregation cue or defaulting to "average".
4. With no attribute recoverable at all, explicit queries raise and
   proactive ones are silently dropped.
"""

from __future__ import annotations

import json
import logging
import urllib.request
from dataclasses import dataclass
from typing import Callable, Optional, Protocol

from proviz.datastore import Island
from proviz.history import ClassLabel, ContextDocument, ContextHistory, normalize_title
from proviz.segmenter import Utterance
from proviz.vocab import (
    AGG_DISPLAY,
    ATTRIBUTE_DISPLAY,
    CHART_TYPE_LABELS,
    find_aggregation,
    find_attributes,
    find_chart_word,
    find_islands,
    find_station_ids,
)

logger = logging.getLogger(__name__)

__all__ = [
    "RefinedQuery",
    "RefineError",
    "RefinementBackend",
    "DeterministicRefiner",
    "LlmRefinementBackend",
    "Refiner",
    "suppress_duplicate",
    "REFINE_INSTRUCTION",
]

PROMPT_VERSION = 1
REFINE_INSTRUCTION = (
    "Rewrite the utterance as one self-contained chart request over the station "
    "climate dataset (attributes: rainfall, temperature, soil moisture, solar, "
    "wind speed). Use the conversation context to resolve pronouns and missing "
    "scope. The request must name at least one attribute and, when known, the "
    "station or island it concerns. Reply with the single rewritten sentence."
)


class RefineError(ValueError):
    """No attribute recoverable for an explicit query."""


@dataclass(frozen=True)
class RefinedQuery:
    text: str
    origin: str  # "explicit" | "proactive"
    source_utterance_id: int
    context_digest: str


class RefinementBackend(Protocol):
    def __call__(self, instruction: str, doc: ContextDocument, utterance: Utterance, origin: str) -> str: ...


def suppress_duplicate(candidate_title: str, h: ContextHistory) -> bool:
    """True iff the normalized title is already in the generated or selected window."""
    return normalize_title(candidate_title) in h.known_keys()


def _scope_phrase(island: Optional[Island], station: Optional[str]) -> str:
    if island is not None:
        return f"the {island.value} stations"
    if station is not None:
        return f"station {station}"
    return "all stations"


def _context_mentions(doc: ContextDocument, skip_utterance_id: int):
    """Newest-first (attribute, region) mentions from the dialogue window."""
    attr = None
    island = None
    station = None
    for uid, _speaker, text in reversed(doc.dialogue):
        if uid == skip_utterance_id:
            continue
        if attr is None:
            attrs = find_attributes(text)
            if attrs:
                attr = attrs[0]
        if island is None and station is None:
            islands = find_islands(text)
            stations = find_station_ids(text)
            if islands:
                island = islands[0]
            elif stations:
                station = stations[0]
        if attr is not None and (island is not None or station is not None):
            break
    return attr, island, station


class DeterministicRefiner:
    """Rule-table backend; a pure function of (utterance text, context document)."""

    def __init__(self, station_islands: Optional[dict[str, str]] = None):
        self._station_islands = station_islands or {}

    def __call__(self, instruction: str, doc: ContextDocument, utterance: Utterance, origin: str) -> str:
        if origin == "proactive":
            return self._refine_discovery(doc, utterance)
        return self._refine_explicit(doc, utterance)

    def _refine_explicit(self, doc: ContextDocument, utterance: Utterance) -> str:
        text = utterance.text.strip()
        if find_attributes(text):
            return text

        attr, ctx_island, ctx_station = _context_mentions(doc, utterance.id)
        if attr is None:
            raise RefineError(f"no dataset attribute recoverable from {text!r} or the recent dialogue")

        islands = find_islands(text)
        stations = find_station_ids(text)
        island = islands[0] if islands else ctx_island
        station = stations[0] if stations else ctx_station
        scope = _scope_phrase(island, station)
        attr_name = ATTRIBUTE_DISPLAY[attr]

        chart = find_chart_word(text)
        if chart is not None:
            return f"Show a {CHART_TYPE_LABELS[chart]} of {attr_name} for {scope}"
        agg, _ = find_aggregation(text)
        if agg is not None:
            return f"Show the {AGG_DISPLAY[agg]} {attr_name} for {scope}"
        return f"Show {attr_name} for {scope}"

    def _refine_discovery(self, doc: ContextDocument, utterance: Utterance) -> str:
        text = utterance.text
        attrs = find_attributes(text)
        attr = attrs[0] if attrs else _context_mentions(doc, utterance.id)[0]
        if attr is None:
            raise RefineError(f"discovery {text!r} names no dataset attribute")

        islands = find_islands(text)
        island: Optional[Island] = islands[0] if islands else None
        if island is None:
            for sid in find_station_ids(text):
                name = self._station_islands.get(sid)
                if name is not None:
                    island = Island(name)
                    break
        if island is None:
            island = _context_mentions(doc, utterance.id)[1]

        agg, _ = find_aggregation(text)
        agg_word = AGG_DISPLAY[agg] if agg is not None else "average"
        scope = f"across the {island.value} stations" if island is not None else "across all stations"
        return f"Compare the {agg_word} {ATTRIBUTE_DISPLAY[attr]} {scope}"


class LlmRefinementBackend:
    """Remote rewriter over a JSON-POST transport.

    Request: {"model", "instruction", "context", "utterance", "origin"};
    response: {"text": "..."}; any transport or schema problem raises, and
    the Refiner then applies its failure policy.
    """

    def __init__(self, endpoint: str, model: str, transport: Optional[Callable[[str, bytes], bytes]] = None, timeout: float = 10.0):
        self.endpoint = endpoint
        self.model = model
        self.timeout = timeout
        self._transport = transport or self._http_post

    def _http_post(self, url: str, body: bytes) -> bytes:
        req = urllib.request.Request(url, data=body, headers={"Content-Type": "application/json"})
        with urllib.request.urlopen(req, timeout=self.timeout) as resp:
            return resp.read()

    def __call__(self, instruction: str, doc: ContextDocument, utterance: Utterance, origin: str) -> str:
        body = json.dumps(
            {
                "model": self.model,
                "instruction": instruction,
                "context": doc.text,
                "utterance": utterance.text,
                "origin": origin,
            }
        ).encode("utf-8")
        reply = json.loads(self._transport(self.endpoint, body))
        text = reply["text"].strip()
        if not text:
            raise ValueError("refinement backend returned empty text")
        return text


class Refiner:
    """Session-facing wrapper: mode gate + backend failure policy."""

    def __init__(
        self,
        mode: str,
        backend: Optional[RefinementBackend] = None,
        station_islands: Optional[dict[str, str]] = None,
    ):
        if mode not in ("proactive", "non_proactive"):
            raise ValueError(f"unknown mode {mode!r}")
        self.mode = mode
        self._fallback = DeterministicRefiner(station_islands)
        self._backend: RefinementBackend = backend or self._fallback

    def dispatch(self, u: Utterance, label: ClassLabel, h: ContextHistory) -> Optional[RefinedQuery]:
        if label is ClassLabel.NON_QUERY:
            return None
        if label is ClassLabel.PROACTIVE and self.mode != "proactive":
            return None
        origin = "explicit" if label is ClassLabel.EXPLICIT else "proactive"
        return self.refine(u, origin, h.snapshot())

    def refine(self, u: Utterance, origin: str, doc: ContextDocument) -> Optional[RefinedQuery]:
        try:
            text = self._backend(REFINE_INSTRUCTION, doc, u, origin)
            if not (find_attributes(text) or find_islands(text) or find_station_ids(text)):
                raise ValueError(f"refined text {text!r} mentions no attribute or scope")
        except RefineError:
            if origin == "proactive":
                return None  # proactivity never surfaces errors
            raise
        except Exception:
            if origin == "proactive":
                logger.debug("proactive refinement dropped after backend failure", exc_info=True)
                return None
            if self._backend is self._fallback:
                raise
            logger.warning("refinement backend failed; using deterministic fallback", exc_info=True)
            text = self._fallback(REFINE_INSTRUCTION, doc, u, origin)
        return RefinedQuery(text=text, origin=origin, source_utterance_id=u.id, context_digest=doc.digest)
