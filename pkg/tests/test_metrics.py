from proviz.metrics import KEYWORDS, compute_metrics, count_keywords, format_delta
from proviz.session import SessionEvent


def ev(seq, t, kind, **payload):
    return SessionEvent(seq=seq, t=t, kind=kind, payload=payload)


def test_keyword_list_is_the_study_list():
    assert KEYWORDS == (
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


def test_spec_example_counts():
    events = [
        ev(1, 0.0, "session_start"),
        ev(2, 1.0, "utterance", id=1, speaker="A", text="rainfall and more rainfall near the station"),
        ev(3, 1.0, "session_end"),
    ]
    report = compute_metrics(events)
    assert report.total_utterances == 1
    assert report.keyword_counts["rainfall"] == 2
    assert report.keyword_counts["station"] == 1
    assert report.keyword_total == 3


def test_word_boundary_rules():
    counts = count_keywords(
        [
            "the stations are windy",        # "stations" is a different word; "windy" too
            "solar energy and solar panels",  # solar twice
            "WILDFIRE is not fire-related",   # "wildfire" no, "fire" (hyphen boundary) yes
            "Temperature, TEMPERATURE!",      # case-insensitive, punctuation boundaries
        ]
    )
    assert counts["station"] == 0
    assert counts["wind"] == 0
    assert counts["solar"] == 2
    assert counts["fire"] == 1
    assert counts["temperature"] == 2


def test_empty_log_all_zero():
    report = compute_metrics([])
    assert report.total_utterances == 0
    assert report.keyword_total == 0
    assert report.charts_generated == 0
    assert report.delta_first_explicit is None


def test_delta_format_matches_table():
    assert format_delta(68) == "1:08"
    assert format_delta(0) == "0:00"
    assert format_delta(209) == "3:29"
    events = [
        ev(1, 0.0, "utterance", id=1, speaker="A", text="hello"),
        ev(2, 68.0, "chart_generated", spec_id="s1", origin="explicit", title="t", dedupe_key="t", summary="", source_utterance_id=1, spec={}),
    ]
    assert compute_metrics(events).delta_first_explicit == "1:08"


def test_delta_ignores_proactive_charts():
    events = [
        ev(1, 0.0, "utterance", id=1, speaker="A", text="hello"),
        ev(2, 10.0, "chart_generated", spec_id="s1", origin="proactive", title="t", dedupe_key="t", summary="", source_utterance_id=1, spec={}),
        ev(3, 30.0, "chart_generated", spec_id="s2", origin="explicit", title="u", dedupe_key="u", summary="", source_utterance_id=1, spec={}),
    ]
    report = compute_metrics(events)
    assert report.delta_first_explicit == "0:30"
    assert report.proactive_charts == 1
    assert report.explicit_charts == 1
