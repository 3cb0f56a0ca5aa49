from hypothesis import given, settings
from hypothesis import strategies as st

from proviz.history import ChartEvent, ContextHistory, normalize_title
from proviz.segmenter import Utterance


def utt(i, text="hello"):
    return Utterance(id=i, speaker="A", text=text, t_start=float(i), t_end=float(i) + 1)


def test_dialogue_window_keeps_last_five():
    h = ContextHistory()
    for i in range(1, 7):
        h.push_utterance(utt(i))
    assert [u.id for u in h.dialogue] == [2, 3, 4, 5, 6]


def test_push_into_empty():
    h = ContextHistory()
    h.push_utterance(utt(1))
    assert [u.id for u in h.dialogue] == [1]


def test_window_saturation():
    h = ContextHistory()
    for i in range(1, 101):
        h.push_utterance(utt(i))
    assert len(h.dialogue) == 5
    assert h.dialogue[-1].id == 100


def test_generated_window_eviction():
    h = ContextHistory()
    for i in range(1, 7):
        h.record_chart(ChartEvent("generated", f"chart {i}", float(i)))
    assert [e.chart_title for e in h.generated] == [f"chart {i}" for i in range(2, 7)]


def test_last_selected_tracks_newest():
    h = ContextHistory()
    assert h.last_selected is None
    h.record_chart(ChartEvent("selected", "first pick", 1.0))
    assert h.last_selected.chart_title == "first pick"
    h.record_chart(ChartEvent("selected", "second pick", 2.0))
    assert h.last_selected.chart_title == "second pick"


def test_generated_and_selected_share_dedupe_key():
    h = ContextHistory()
    h.record_chart(ChartEvent("generated", "Rainfall — Maui", 1.0))
    h.record_chart(ChartEvent("selected", "rainfall   maui!", 2.0))
    assert len(h.generated) == 1 and len(h.selected) == 1
    assert h.generated[0].dedupe_key == h.selected[0].dedupe_key


@given(st.text())
def test_normalization_idempotent(s):
    assert normalize_title(normalize_title(s)) == normalize_title(s)


def test_snapshot_empty_history():
    doc = ContextHistory().snapshot()
    assert doc.text == "\n".join(
        ["[dialogue]", "[generated charts]", "[selected charts]", "last_selected: none"]
    )


def test_snapshot_deterministic():
    h = ContextHistory()
    h.push_utterance(utt(1, "rain for Maui"))
    h.push_utterance(utt(2, "show it"))
    h.record_chart(ChartEvent("generated", "line chart of rainfall", 3.0))
    assert h.snapshot().text == h.snapshot().text
    assert h.snapshot().digest == h.snapshot().digest


def test_snapshot_full_windows_lists_everything():
    h = ContextHistory()
    for i in range(1, 9):
        h.push_utterance(utt(i))
        h.record_chart(ChartEvent("generated", f"g{i}", float(i)))
        h.record_chart(ChartEvent("selected", f"s{i}", float(i)))
    doc = h.snapshot()
    assert len(doc.dialogue) == 5
    assert len(doc.generated_titles) == 5
    assert len(doc.selected_titles) == 5
    assert doc.last_selected == "s8"


@settings(max_examples=200, deadline=None)
@given(st.lists(st.sampled_from(["u", "g", "s"]), max_size=60))
def test_windows_match_suffix_oracle(ops):
    h = ContextHistory()
    pushed = {"u": [], "g": [], "s": []}
    for i, op in enumerate(ops):
        if op == "u":
            u = utt(i, f"text {i}")
            h.push_utterance(u)
            pushed["u"].append(u.id)
        else:
            kind = "generated" if op == "g" else "selected"
            h.record_chart(ChartEvent(kind, f"title {i}", float(i)))
            pushed[op].append(f"title {i}")
    assert [u.id for u in h.dialogue] == pushed["u"][-5:]
    assert [e.chart_title for e in h.generated] == pushed["g"][-5:]
    assert [e.chart_title for e in h.selected] == pushed["s"][-5:]
