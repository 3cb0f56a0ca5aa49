"""Synthetic labeled corpus for the three-way utterance classifier.

The original study's labeled utterances are not available, so training data
comes from seeded sentence templates filled with the dataset vocabulary
(attributes, islands, station ids, comparatives) plus small-talk
distractors. An external-file loader accepts user-provided corpora in
``label<TAB>text`` form.

Proactive content here is all of the Discovery flavor (stated findings);
the other proactivity flavors that exist in principle (Disagreement,
Preference, Criticism, Curiosity, Confusion) are listed for reference but
never trigger generation and are not output classes.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path

from proviz.history import ClassLabel

__all__ = ["LabeledCorpus", "generate_corpus", "load_corpus", "save_corpus", "DEFAULT_CORPUS_SEED"]

DEFAULT_CORPUS_SEED = 7020
DEFAULT_SIZE_PER_CLASS = 400

PROACTIVITY_FLAVORS = (
    "Discovery",  # the one that drives chart generation
    "Disagreement",
    "Preference",
    "Criticism",
    "Curiosity",
    "Confusion",
)

ATTRIBUTE_PHRASES = [
    "rainfall",
    "temperature",
    "air temperature",
    "soil moisture",
    "solar energy",
    "solar",
    "wind speed",
]
ISLANDS = ["Kauai", "Oahu", "Molokai", "Maui", "Hawaii", "the Big Island"]
STATION_IDS = [str(i) for i in range(1, 34)]
CHART_WORDS = ["chart", "graph", "plot", "visualization"]
CHART_TYPES = ["line chart", "bar chart", "scatter plot", "histogram", "box plot"]
SUPERLATIVES = ["highest", "lowest", "most", "least"]
MONTHS = ["January", "February", "March", "April", "May", "June"]

EXPLICIT_TEMPLATES = [
    "Generate a {cw} on the {attr} for {island}.",
    "Show us a {cw} of the {attr} on {island}.",
    "Display a {cw} of the {sup} recorded {attr} measurement in {island}.",
    "Can you plot the {attr} for station {sid}?",
    "Make a {ctype} of {attr} for the {island} stations.",
    "Show {attr} versus {attr2} for station {sid}.",
    "Plot the average {attr} per island.",
    "Show the {attr} for station {sid} over time.",
    "Give me a histogram of the {attr} distribution on {island}.",
    "Show it as a {ctype}.",
    "Chart the total {attr} for {island}.",
    "Draw the {attr} for stations {sid} and {sid2}.",
    "Compare the {attr} across the {island} stations.",
    "Now show me the {attr} instead.",
    "Put up a {ctype} of {attr} please.",
]

PROACTIVE_TEMPLATES = [
    "Station {sid} on {island} has the {sup} {attr}.",
    "So as {attr} increases, so does {attr2}.",
    "It looks like {island} gets more {attr} than {island2}.",
    "{island} seems to have the {sup} {attr}.",
    "The variability is lower in {sid}.",
    "Station {sid} has a better average {attr} than station {sid2}.",
    "I think station {sid} should be a good pick, but it has lower {attr}.",
    "Well, station {sid} is the best for {attr}.",
    "The {attr} drops a lot in {month}.",
    "Interesting, the {attr} on {island} is much higher than on {island2}.",
    "There are a lot of dry days on {island}.",
    "Station {sid} barely got any {attr} this spring.",
    "That means {island} would be great for wind farms.",
    "Looks like the {attr} and {attr2} move together on {island}.",
    "Huh, station {sid} beats everything else on {attr}.",
]

NON_QUERY_TEMPLATES = [
    "What should we do next?",
    "Do you want to start with {island}?",
    "I'm not sure I understand the task yet.",
    "Where did you put the instructions?",
    "Let's take a quick break.",
    "Okay, sounds good to me.",
    "Hmm, let me think about that for a second.",
    "Can you pass me the mouse?",
    "We should wrap up soon.",
    "Sorry, say that again?",
    "My chair is squeaking so much.",
    "Are we allowed to zoom in on this screen?",
    "I had coffee before this and I'm still sleepy.",
    "You go first, I'll take notes.",
    "Which one of us is clicking?",
    "Hold on, I need to re-read the prompt.",
    "That reminds me of my hometown.",
    "Is the microphone picking us up?",
    "Let's decide who presents the answer.",
    "Give me a second to write this down.",
]


@dataclass(frozen=True)
class LabeledCorpus:
    examples: tuple[tuple[str, ClassLabel], ...]
    provenance: str  # "seeded-templates" | "external-file"

    def __len__(self):
        return len(self.examples)

    def texts(self) -> list[str]:
        return [text for text, _ in self.examples]

    def labels(self) -> list[ClassLabel]:
        return [label for _, label in self.examples]


def _fill(template: str, rng: random.Random) -> str:
    attr = rng.choice(ATTRIBUTE_PHRASES)
    attr2 = rng.choice([a for a in ATTRIBUTE_PHRASES if a.split()[0] != attr.split()[0]])
    island = rng.choice(ISLANDS)
    island2 = rng.choice([i for i in ISLANDS if i != island])
    sid = rng.choice(STATION_IDS)
    sid2 = rng.choice([s for s in STATION_IDS if s != sid])
    return template.format(
        attr=attr,
        attr2=attr2,
        island=island,
        island2=island2,
        sid=sid,
        sid2=sid2,
        cw=rng.choice(CHART_WORDS),
        ctype=rng.choice(CHART_TYPES),
        sup=rng.choice(SUPERLATIVES),
        month=rng.choice(MONTHS),
    )


def generate_corpus(
    seed: int = DEFAULT_CORPUS_SEED, size_per_class: int = DEFAULT_SIZE_PER_CLASS
) -> LabeledCorpus:
    """Deterministic template corpus with size_per_class examples per label."""
    if size_per_class < 1:
        raise ValueError("size_per_class must be >= 1")
    rng = random.Random(seed)
    examples: list[tuple[str, ClassLabel]] = []
    for label, templates in (
        (ClassLabel.EXPLICIT, EXPLICIT_TEMPLATES),
        (ClassLabel.PROACTIVE, PROACTIVE_TEMPLATES),
        (ClassLabel.NON_QUERY, NON_QUERY_TEMPLATES),
    ):
        for i in range(size_per_class):
            template = templates[i % len(templates)]
            examples.append((_fill(template, rng), label))
    return LabeledCorpus(examples=tuple(examples), provenance="seeded-templates")


def load_corpus(path: str | Path) -> LabeledCorpus:
    """Read ``label<TAB>text`` lines; labels must be the three class names."""
    examples = []
    for line_no, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        try:
            label_raw, text = line.split("\t", 1)
        except ValueError:
            raise ValueError(f"corpus line {line_no}: expected 'label<TAB>text'") from None
        try:
            label = ClassLabel(label_raw)
        except ValueError:
            valid = ", ".join(l.value for l in ClassLabel)
            raise ValueError(f"corpus line {line_no}: unknown label {label_raw!r} (valid: {valid})") from None
        if not text.strip():
            raise ValueError(f"corpus line {line_no}: empty text")
        examples.append((text, label))
    return LabeledCorpus(examples=tuple(examples), provenance="external-file")


def save_corpus(corpus: LabeledCorpus, path: str | Path) -> None:
    lines = [f"{label.value}\t{text}" for text, label in corpus.examples]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
