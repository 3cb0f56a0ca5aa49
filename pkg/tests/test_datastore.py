"""Store tests; aggregate expectations come from independent text passes over the CSV."""

from datetime import date

import pytest

from proviz.datastore import (
    Aggregation,
    Attribute,
    DataQuery,
    GroupBy,
    Island,
    IngestError,
    QueryError,
    ingest_csv,
)
from tests.paths import FIXTURE_CSV

WINDOW = (date(2024, 1, 1), date(2024, 6, 30))


def raw_rows():
    """Independent pass: plain text splitting, no store code involved."""
    lines = FIXTURE_CSV.read_text().splitlines()[1:]
    for line in lines:
        sid, _name, island, _lat, _lon, day, attr, value = line.split(",")
        yield sid, island, day, attr, float(value)


def test_island_counts_match_study_layout(store):
    counts = store.island_counts()
    assert store.station_count == 33
    assert counts == {
        Island.KAUAI: 3,
        Island.OAHU: 3,
        Island.MOLOKAI: 1,
        Island.MAUI: 10,
        Island.HAWAII: 16,
    }
    assert sum(counts.values()) == store.station_count


def test_full_window_fetch_matches_text_count(store):
    oracle = sum(1 for sid, _i, _d, attr, _v in raw_rows() if sid == "4" and attr == "rainfall")
    assert oracle == 181  # station 4's rainfall series has one missing day
    table = store.fetch(
        DataQuery(frozenset([Attribute.RAINFALL]), frozenset(["4"]), WINDOW)
    )
    assert len(table) == oracle


def test_out_of_window_range_gives_empty_table(store):
    table = store.fetch(
        DataQuery(
            frozenset([Attribute.RAINFALL]),
            frozenset(["4"]),
            (date(2025, 1, 1), date(2025, 2, 1)),
        )
    )
    assert len(table) == 0


def test_kauai_max_matches_bruteforce(store):
    kauai = store.resolve_island("Kauai")
    assert len(kauai) == 3
    oracle = {}
    for sid, island, _d, attr, value in raw_rows():
        if island == "Kauai" and attr == "rainfall":
            oracle[sid] = max(oracle.get(sid, float("-inf")), value)
    table = store.fetch(
        DataQuery(
            frozenset([Attribute.RAINFALL]),
            kauai,
            WINDOW,
            aggregation=Aggregation.MAX,
            group_by=GroupBy.STATION,
        )
    )
    assert len(table) == 3
    assert {r.key: r.value for r in table.rows} == oracle


@pytest.mark.parametrize("agg", [Aggregation.MEAN, Aggregation.MIN, Aggregation.MAX, Aggregation.SUM])
@pytest.mark.parametrize("group", [GroupBy.STATION, GroupBy.ISLAND, GroupBy.MONTH])
def test_aggregates_match_bruteforce_fold(store, agg, group):
    stations = store.resolve_island("Maui")
    islands = {sid: st.island.value for sid, st in store.stations.items()}
    rows = sorted(
        (r for r in raw_rows() if r[0] in stations and r[3] == "temperature"),
        key=lambda r: ((len(r[0]), r[0]), r[2]),  # the documented fold order
    )
    folded = {}
    for sid, _island, day, attr, value in rows:
        if group is GroupBy.STATION:
            key = sid
        elif group is GroupBy.ISLAND:
            key = islands[sid]
        else:
            key = day[:7]
        folded.setdefault(key, []).append(value)

    expected = {
        key: {
            Aggregation.MEAN: sum(vs) / len(vs),
            Aggregation.MIN: min(vs),
            Aggregation.MAX: max(vs),
            Aggregation.SUM: sum(vs),
        }[agg]
        for key, vs in folded.items()
    }
    table = store.fetch(
        DataQuery(frozenset([Attribute.TEMPERATURE]), stations, WINDOW, aggregation=agg, group_by=group)
    )
    got = {r.key: r.value for r in table.rows}
    assert got.keys() == expected.keys()
    for key in expected:
        if agg is Aggregation.MEAN:
            assert got[key] == pytest.approx(expected[key], rel=1e-9)
        else:
            assert got[key] == expected[key]


def test_fetch_is_pure(store):
    query = DataQuery(frozenset([Attribute.SOLAR]), frozenset(["18", "19"]), WINDOW)
    assert store.fetch(query) == store.fetch(query)


def test_row_order_deterministic(store):
    table = store.fetch(
        DataQuery(
            frozenset([Attribute.RAINFALL, Attribute.SOLAR]),
            frozenset(["2", "10", "4"]),
            WINDOW,
        )
    )
    keys = [(r.key, r.day, r.attribute.value) for r in table.rows]
    order = {"2": 0, "4": 1, "10": 2}
    assert keys == sorted(keys, key=lambda k: (order[k[0]], k[1], k[2]))


def test_resolve_island_aliases(store):
    assert len(store.resolve_island("Big Island")) == 16
    assert len(store.resolve_island("molokai")) == 1
    with pytest.raises(QueryError, match="Lanai"):
        store.resolve_island("Lanai")


def test_unknown_station_errors(store):
    with pytest.raises(QueryError, match="99"):
        store.fetch(DataQuery(frozenset([Attribute.SOLAR]), frozenset(["99"]), WINDOW))


def test_query_invariants():
    with pytest.raises(QueryError):
        DataQuery(frozenset(), frozenset(["1"]), WINDOW)
    with pytest.raises(QueryError):
        DataQuery(frozenset([Attribute.SOLAR]), frozenset(["1"]), (WINDOW[1], WINDOW[0]))
    with pytest.raises(QueryError, match="group_by"):
        DataQuery(frozenset([Attribute.SOLAR]), frozenset(["1"]), WINDOW, group_by=GroupBy.STATION)


HEADER = "station_id,station_name,island,latitude,longitude,date,attribute,value"


def test_header_only_file(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text(HEADER + "\n")
    store = ingest_csv(path)
    assert store.station_count == 0
    assert store.record_count == 0


def test_singleton_file(tmp_path):
    path = tmp_path / "one.csv"
    path.write_text(HEADER + "\n9,Hana,Maui,20.76,-155.99,2024-02-01,rainfall,3.5\n")
    store = ingest_csv(path)
    assert store.station_count == 1
    assert store.record_count == 1


@pytest.mark.parametrize(
    "row,message",
    [
        ("9,Hana,Maui,20.76,-155.99,2024-02-01,rainfall", "line 2"),
        ("9,Hana,Maui,20.76,-155.99,2024-02-01,vibes,3.5", "vibes"),
        ("9,Hana,Atlantis,20.76,-155.99,2024-02-01,rainfall,3.5", "Atlantis"),
        ("9,Hana,Maui,20.76,-155.99,2024-02-30,rainfall,3.5", "2024-02-30"),
        ("9,Hana,Maui,20.76,-155.99,2024-02-01,rainfall,nan", "finite"),
        ("9,Hana,Maui,48.0,-155.99,2024-02-01,rainfall,3.5", "bounds"),
        ("9,Hana,Maui,20.76,-155.99,2024-09-01,rainfall,3.5", "window"),
    ],
)
def test_ingest_rejects_malformed_rows(tmp_path, row, message):
    path = tmp_path / "bad.csv"
    path.write_text(HEADER + "\n" + row + "\n")
    with pytest.raises(IngestError, match=message):
        ingest_csv(path)


def test_ingest_rejects_duplicates(tmp_path):
    path = tmp_path / "dup.csv"
    row = "9,Hana,Maui,20.76,-155.99,2024-02-01,rainfall,3.5"
    path.write_text(HEADER + "\n" + row + "\n" + row + "\n")
    with pytest.raises(IngestError, match="duplicate"):
        ingest_csv(path)
