"""Station climate data store.

Ingests the station-subset CSV (one observation per row) and serves the
queries every chart plan resolves against: raw time series, grouped
aggregates, and island lookups. The store is immutable after ingest, so any
number of readers can share one handle; re-ingesting produces a new handle.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from datetime import date
from enum import Enum
from pathlib import Path
from typing import Iterable, NamedTuple, Optional

__all__ = [
    "Island",
    "Attribute",
    "Station",
    "ClimateRecord",
    "DataQuery",
    "Row",
    "TimeSeriesTable",
    "ClimateStore",
    "IngestError",
    "QueryError",
    "ATTRIBUTE_UNITS",
    "DATASET_WINDOW",
    "station_sort_key",
]

# Hawaii bounding box used to sanity-check station coordinates at ingest.
LAT_RANGE = (18.5, 22.5)
LON_RANGE = (-161.0, -154.0)

# The study window: the source material says the data ends "June 31st", a
# nonexistent date, normalized here to June 30.
DATASET_WINDOW = (date(2024, 1, 1), date(2024, 6, 30))

CSV_HEADER = [
    "station_id",
    "station_name",
    "island",
    "latitude",
    "longitude",
    "date",
    "attribute",
    "value",
]


class Island(str, Enum):
    KAUAI = "Kauai"
    OAHU = "Oahu"
    MOLOKAI = "Molokai"
    MAUI = "Maui"
    HAWAII = "Hawaii"


# Unknown names fail loudly rather than fuzzy-match; this table is the whole
# alias surface.
ISLAND_ALIASES = {"big island": Island.HAWAII}


class Attribute(str, Enum):
    RAINFALL = "rainfall"
    TEMPERATURE = "temperature"
    SOIL_MOISTURE = "soil_moisture"
    SOLAR = "solar"
    WIND_SPEED = "wind_speed"


ATTRIBUTE_UNITS = {
    Attribute.RAINFALL: "mm",
    Attribute.TEMPERATURE: "°C",
    Attribute.SOIL_MOISTURE: "fraction",
    Attribute.SOLAR: "W/m²",
    Attribute.WIND_SPEED: "m/s",
}


class IngestError(ValueError):
    """Raised when the CSV violates the documented schema."""


class QueryError(ValueError):
    """Raised for queries naming unknown stations or islands."""


@dataclass(frozen=True)
class Station:
    id: str
    name: str
    island: Island
    latitude: float
    longitude: float


@dataclass(frozen=True)
class ClimateRecord:
    station_id: str
    day: date
    attribute: Attribute
    value: float


class Aggregation(str, Enum):
    NONE = "none"
    MEAN = "mean"
    MIN = "min"
    MAX = "max"
    SUM = "sum"


class GroupBy(str, Enum):
    STATION = "station"
    ISLAND = "island"
    MONTH = "month"


@dataclass(frozen=True)
class DataQuery:
    attributes: frozenset[Attribute]
    stations: frozenset[str]
    date_range: tuple[date, date]
    aggregation: Aggregation = Aggregation.NONE
    group_by: Optional[GroupBy] = None

    def __post_init__(self):
        if not self.attributes:
            raise QueryError("query needs at least one attribute")
        if not self.stations:
            raise QueryError("query needs at least one station")
        start, end = self.date_range
        if start > end:
            raise QueryError(f"date range start {start} is after end {end}")
        if self.aggregation is Aggregation.NONE and self.group_by is not None:
            raise QueryError("group_by requires an aggregation")


class Row(NamedTuple):
    """One result row: key is a station id or, when grouped, the group key."""

    key: str
    day: Optional[date]
    attribute: Attribute
    value: float


@dataclass(frozen=True)
class TimeSeriesTable:
    rows: tuple[Row, ...]

    def __len__(self):
        return len(self.rows)


def station_sort_key(station_id: str) -> tuple[int, str]:
    # Orders digit-string ids numerically ("4" before "10") and everything
    # else lexicographically after them.
    return (len(station_id), station_id) if station_id.isdigit() else (99, station_id)


def _parse_value(raw: str, line_no: int) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise IngestError(f"line {line_no}: value {raw!r} is not a number") from None
    if not math.isfinite(value):
        raise IngestError(f"line {line_no}: value {raw!r} is not finite")
    return value


@dataclass
class ClimateStore:
    """Immutable view over the ingested stations and daily records."""

    stations: dict[str, Station]
    records: tuple[ClimateRecord, ...]
    window: tuple[date, date] = DATASET_WINDOW
    _by_station: dict[str, list[ClimateRecord]] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        for rec in self.records:
            self._by_station.setdefault(rec.station_id, []).append(rec)

    # -- introspection -------------------------------------------------

    @property
    def station_count(self) -> int:
        return len(self.stations)

    @property
    def record_count(self) -> int:
        return len(self.records)

    def island_counts(self) -> dict[Island, int]:
        counts = {island: 0 for island in Island}
        for st in self.stations.values():
            counts[st.island] += 1
        return counts

    def station_islands(self) -> dict[str, str]:
        """station id -> island name, for components that only need the map."""
        return {sid: st.island.value for sid, st in self.stations.items()}

    # -- queries --------------------------------------------------------

    def resolve_island(self, name: str) -> frozenset[str]:
        """All station ids on the named island; aliases like "Big Island" allowed."""
        folded = " ".join(name.lower().split())
        island = ISLAND_ALIASES.get(folded)
        if island is None:
            for candidate in Island:
                if candidate.value.lower() == folded:
                    island = candidate
                    break
        if island is None:
            valid = ", ".join([i.value for i in Island] + ["Big Island"])
            raise QueryError(f"unknown island {name!r}; valid names: {valid}")
        return frozenset(sid for sid, st in self.stations.items() if st.island == island)

    def fetch(self, query: DataQuery) -> TimeSeriesTable:
        """Run a query. Pure: identical queries return identical tables."""
        missing = sorted(query.stations - self.stations.keys(), key=station_sort_key)
        if missing:
            raise QueryError(f"unknown station ids: {', '.join(missing)}")

        start = max(query.date_range[0], self.window[0])
        end = min(query.date_range[1], self.window[1])
        if start > end:
            return TimeSeriesTable(rows=())

        matched = [
            rec
            for sid in query.stations
            for rec in self._by_station.get(sid, [])
            if rec.attribute in query.attributes and start <= rec.day <= end
        ]
        # Canonical (station, date, attribute) order; aggregation folds in this
        # order, which makes even float sums bit-reproducible across runs.
        matched.sort(key=lambda r: (station_sort_key(r.station_id), r.day, r.attribute.value))

        if query.aggregation is Aggregation.NONE:
            rows = [Row(rec.station_id, rec.day, rec.attribute, rec.value) for rec in matched]
            rows.sort(key=lambda r: (station_sort_key(r.key), r.day, r.attribute.value))
            return TimeSeriesTable(rows=tuple(rows))

        groups: dict[tuple[str, Attribute], list[float]] = {}
        for rec in matched:
            groups.setdefault((self._group_key(rec, query.group_by), rec.attribute), []).append(rec.value)

        agg = {
            Aggregation.MEAN: lambda vs: sum(vs) / len(vs),
            Aggregation.MIN: min,
            Aggregation.MAX: max,
            Aggregation.SUM: sum,
        }[query.aggregation]
        rows = [Row(key, None, attr, agg(values)) for (key, attr), values in groups.items()]
        rows.sort(key=lambda r: (station_sort_key(r.key), r.attribute.value))
        return TimeSeriesTable(rows=tuple(rows))

    def _group_key(self, rec: ClimateRecord, group_by: Optional[GroupBy]) -> str:
        if group_by is None:
            return "all"
        if group_by is GroupBy.STATION:
            return rec.station_id
        if group_by is GroupBy.ISLAND:
            return self.stations[rec.station_id].island.value
        return f"{rec.day.year:04d}-{rec.day.month:02d}"


def ingest_csv(path: str | Path, window: tuple[date, date] = DATASET_WINDOW) -> ClimateStore:
    """Parse the station CSV into a new store handle.

    Schema (header required):
    ``station_id,station_name,island,latitude,longitude,date,attribute,value``
    Any malformed row aborts the ingest with the offending line number.
    """
    path = Path(path)
    stations: dict[str, Station] = {}
    records: list[ClimateRecord] = []
    seen: set[tuple[str, date, Attribute]] = set()

    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestError(f"{path}: file is empty, expected header row") from None
        if header != CSV_HEADER:
            raise IngestError(f"{path}: bad header {header!r}, expected {CSV_HEADER!r}")

        for line_no, raw in enumerate(reader, start=2):
            if not raw:
                continue
            if len(raw) != len(CSV_HEADER):
                raise IngestError(f"line {line_no}: expected {len(CSV_HEADER)} fields, got {len(raw)}")
            sid, name, island_raw, lat_raw, lon_raw, day_raw, attr_raw, value_raw = raw

            try:
                island = Island(island_raw)
            except ValueError:
                raise IngestError(f"line {line_no}: unknown island {island_raw!r}") from None
            try:
                attribute = Attribute(attr_raw)
            except ValueError:
                raise IngestError(f"line {line_no}: unknown attribute {attr_raw!r}") from None
            try:
                day = date.fromisoformat(day_raw)
            except ValueError:
                raise IngestError(f"line {line_no}: bad date {day_raw!r}") from None

            lat = _parse_value(lat_raw, line_no)
            lon = _parse_value(lon_raw, line_no)
            if not (LAT_RANGE[0] <= lat <= LAT_RANGE[1] and LON_RANGE[0] <= lon <= LON_RANGE[1]):
                raise IngestError(f"line {line_no}: coordinates ({lat}, {lon}) outside Hawaii bounds")
            if not (window[0] <= day <= window[1]):
                raise IngestError(f"line {line_no}: date {day} outside dataset window {window}")

            station = Station(id=sid, name=name, island=island, latitude=lat, longitude=lon)
            known = stations.get(sid)
            if known is None:
                stations[sid] = station
            elif known != station:
                raise IngestError(f"line {line_no}: station {sid!r} redefined with different metadata")

            key = (sid, day, attribute)
            if key in seen:
                raise IngestError(f"line {line_no}: duplicate record for {key}")
            seen.add(key)
            records.append(ClimateRecord(sid, day, attribute, _parse_value(value_raw, line_no)))

    return ClimateStore(stations=stations, records=tuple(records), window=window)


def full_window_query(
    attributes: Iterable[Attribute],
    stations: Iterable[str],
    window: tuple[date, date] = DATASET_WINDOW,
    aggregation: Aggregation = Aggregation.NONE,
    group_by: Optional[GroupBy] = None,
) -> DataQuery:
    return DataQuery(
        attributes=frozenset(attributes),
        stations=frozenset(stations),
        date_range=window,
        aggregation=aggregation,
        group_by=group_by,
    )
