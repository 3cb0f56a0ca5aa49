import itertools

import pytest

from proviz.datastore import Aggregation, Attribute, GroupBy
from proviz.refiner import RefinedQuery
from proviz.reasoner import (
    INDEPENDENT_STAGES,
    LlmStageBackend,
    Reasoner,
    StageError,
    extract_attributes,
    extract_stations,
    plan,
    select_chart_type,
    select_transform,
)
from proviz.vocab import ChartType


def rq(text, origin="explicit"):
    return RefinedQuery(text=text, origin=origin, source_utterance_id=1, context_digest="x")


SCHEMA = list(Attribute)


def test_attribute_extraction_paper_example():
    attrs, reason = extract_attributes(rq("Show us a graph of the air temperature on Oahu."), SCHEMA)
    assert attrs == (Attribute.TEMPERATURE,)
    assert "temperature" in reason


def test_attribute_extraction_two_attributes():
    attrs, _ = extract_attributes(rq("rainfall versus wind speed"), SCHEMA)
    assert attrs == (Attribute.RAINFALL, Attribute.WIND_SPEED)


def test_attribute_extraction_caps_at_two():
    attrs, reason = extract_attributes(rq("rainfall, temperature and solar please"), SCHEMA)
    assert attrs == (Attribute.RAINFALL, Attribute.TEMPERATURE)
    assert "dropped" in reason


def test_attribute_extraction_error():
    with pytest.raises(StageError, match=r"\[attributes\]"):
        extract_attributes(rq("show me the vibes"), SCHEMA)


def test_station_extraction_big_island(store):
    ids, _ = extract_stations(rq("Generate a chart on the solar energy for the Big Island."), store)
    assert len(ids) == 16
    assert ids == store.resolve_island("Hawaii")


def test_station_extraction_default_all(store):
    ids, reason = extract_stations(rq("show rainfall over time"), store)
    assert len(ids) == 33
    assert "all stations" in reason


def test_station_extraction_specific_station(store):
    ids, _ = extract_stations(rq("show rainfall for station 4"), store)
    assert ids == frozenset({"4"})


def test_station_extraction_unknown_station(store):
    with pytest.raises(StageError, match="99"):
        extract_stations(rq("show rainfall for station 99"), store)


def test_transform_superlative_paper_example():
    transform, _ = select_transform(rq("Display a chart of the highest recorded rainfall measurement in Hawaii."))
    assert transform.aggregation is Aggregation.MAX
    assert transform.group_by is GroupBy.STATION


def test_transform_default_none():
    transform, reason = select_transform(rq("rainfall over time for station 4"))
    assert transform.aggregation is Aggregation.NONE
    assert transform.group_by is None
    assert "raw" in reason


def test_transform_mean_by_island():
    transform, _ = select_transform(rq("average temperature per island"))
    assert transform.aggregation is Aggregation.MEAN
    assert transform.group_by is GroupBy.ISLAND


def test_chart_type_two_attributes_scatter():
    from proviz.reasoner import Transform

    chart, reason = select_chart_type((Attribute.RAINFALL, Attribute.TEMPERATURE), Transform(), rq("rainfall and temperature"))
    assert chart is ChartType.SCATTER
    assert "scatter" in reason


def test_chart_type_default_line():
    from proviz.reasoner import Transform

    chart, reason = select_chart_type((Attribute.RAINFALL,), Transform(), rq("rainfall for station 4"))
    assert chart is ChartType.LINE
    assert reason == "I chose a line chart to show change over the full date range."


def test_chart_type_boxplot_override():
    from proviz.reasoner import Transform

    chart, _ = select_chart_type((Attribute.RAINFALL,), Transform(), rq("show rainfall as a box plot"))
    assert chart is ChartType.BOXPLOT


def test_chart_type_histogram_intent_and_bar_rule():
    from proviz.reasoner import Transform

    chart, _ = select_chart_type((Attribute.SOLAR,), Transform(), rq("solar distribution"))
    assert chart is ChartType.HISTOGRAM
    chart, _ = select_chart_type(
        (Attribute.SOLAR,),
        Transform(aggregation=Aggregation.MAX, group_by=GroupBy.STATION),
        rq("highest solar"),
    )
    assert chart is ChartType.BAR


def test_chart_type_incompatible_override_errors():
    from proviz.reasoner import Transform

    with pytest.raises(StageError, match="scatter plot needs exactly 2"):
        select_chart_type((Attribute.RAINFALL,), Transform(), rq("scatter plot of rainfall"))
    with pytest.raises(StageError, match="needs exactly 1"):
        select_chart_type(
            (Attribute.RAINFALL, Attribute.SOLAR), Transform(), rq("line chart of rainfall and solar")
        )


def test_plan_composition(store):
    p = plan(rq("Show a line chart of rainfall for station 4 on Oahu"), store)
    assert p.attributes == (Attribute.RAINFALL,)
    assert p.stations == frozenset({"4"})
    assert p.date_range == store.window
    assert p.transform.aggregation is Aggregation.NONE
    assert p.chart_type is ChartType.LINE
    assert set(p.reasoning) == {"attributes", "stations", "transform", "chart_type"}


def test_plan_title_deterministic(store):
    q = rq("Show a line chart of rainfall for station 4")
    assert plan(q, store).title == plan(q, store).title


def test_plan_big_island_solar(store):
    p = plan(rq("solar energy for the Big Island"), store)
    assert p.attributes == (Attribute.SOLAR,)
    assert len(p.stations) == 16


def test_stage_commutativity_all_orders(store):
    reasoner = Reasoner(store)
    queries = [
        "Show a line chart of rainfall for station 4",
        "Compare the highest rainfall across the Oahu stations",
        "average temperature per island",
        "rainfall versus wind speed on Maui",
        "histogram of solar for the Big Island",
    ]
    for text in queries:
        plans = [reasoner.plan(rq(text), stage_order=order) for order in itertools.permutations(INDEPENDENT_STAGES)]
        assert all(p == plans[0] for p in plans[1:])


def test_closed_vocabulary(store):
    p = plan(rq("Compare the highest rainfall across the Oahu stations"), store)
    assert all(a in list(Attribute) for a in p.attributes)
    assert p.stations <= set(store.stations)
    assert p.chart_type in list(ChartType)
    assert p.transform.aggregation in list(Aggregation)


def test_llm_stage_backend_validates_vocabulary(store):
    def good_transport(url, body):
        return b'{"value": ["rainfall"], "reasoning": "model says rainfall"}'

    backend = LlmStageBackend("http://fake", "m", transport=good_transport)
    value, reason = backend("attributes", rq("anything"), store, {})
    assert value == (Attribute.RAINFALL,)
    assert reason == "model says rainfall"

    def bad_transport(url, body):
        return b'{"value": ["humidity"], "reasoning": "nope"}'

    backend = LlmStageBackend("http://fake", "m", transport=bad_transport)
    with pytest.raises(StageError, match="closed vocabulary"):
        backend("attributes", rq("anything"), store, {})


def test_llm_stage_backend_in_reasoner(store):
    def station_transport(url, body):
        return b'{"value": ["4", "5"], "reasoning": "two oahu stations"}'

    reasoner = Reasoner(store, {"stations": LlmStageBackend("http://fake", "m", transport=station_transport)})
    p = reasoner.plan(rq("show rainfall"))
    assert p.stations == frozenset({"4", "5"})
    assert p.reasoning["stations"] == "two oahu stations"
