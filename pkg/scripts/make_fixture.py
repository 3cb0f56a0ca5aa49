#!/usr/bin/env python3
"""Generate data/hcdp_subset.csv, the 33-station fixture.

Station layout reproduces the study's per-island distribution (Kauai 3,
Oahu 3, Molokai 1, Maui 10, Hawaii 16) with invented but plausible
coordinates. Values are seeded synthetic daily series over Jan 1 - Jun 30
2024; a small seeded fraction of days is dropped per series so consumers
must tolerate sparse series. Station 4's rainfall series drops exactly one
day (2024-03-15), giving it 181 daily records.
"""

from __future__ import annotations

import csv
import math
from datetime import date, timedelta
from pathlib import Path

import numpy as np

SEED = 20240101
START = date(2024, 1, 1)
END = date(2024, 6, 30)

# (id, name, island, lat, lon)
STATIONS = [
    ("1", "Lihue", "Kauai", 21.98, -159.34),
    ("2", "Hanalei", "Kauai", 22.20, -159.50),
    ("3", "Kokee", "Kauai", 22.13, -159.66),
    ("4", "Honolulu", "Oahu", 21.31, -157.86),
    ("5", "Waianae", "Oahu", 21.44, -158.19),
    ("6", "Kahuku", "Oahu", 21.68, -157.95),
    ("7", "Kaunakakai", "Molokai", 21.09, -157.02),
    ("8", "Kahului", "Maui", 20.89, -156.47),
    ("9", "Hana", "Maui", 20.76, -155.99),
    ("10", "Lahaina", "Maui", 20.87, -156.68),
    ("11", "Kula", "Maui", 20.79, -156.33),
    ("12", "Haleakala", "Maui", 20.71, -156.25),
    ("13", "Kihei", "Maui", 20.76, -156.46),
    ("14", "Wailuku", "Maui", 20.89, -156.50),
    ("15", "Makawao", "Maui", 20.86, -156.31),
    ("16", "Kapalua", "Maui", 20.99, -156.64),
    ("17", "Keanae", "Maui", 20.86, -156.15),
    ("18", "Hilo", "Hawaii", 19.72, -155.09),
    ("19", "Kailua-Kona", "Hawaii", 19.64, -155.99),
    ("20", "Kamuela", "Hawaii", 20.02, -155.67),
    ("21", "Volcano", "Hawaii", 19.44, -155.23),
    ("22", "Pahoa", "Hawaii", 19.50, -154.95),
    ("23", "Honokaa", "Hawaii", 20.08, -155.47),
    ("24", "Naalehu", "Hawaii", 19.06, -155.59),
    ("25", "Captain Cook", "Hawaii", 19.50, -155.92),
    ("26", "Laupahoehoe", "Hawaii", 19.98, -155.23),
    ("27", "Pahala", "Hawaii", 19.20, -155.48),
    ("28", "Kealakekua", "Hawaii", 19.52, -155.92),
    ("29", "Waikoloa", "Hawaii", 19.94, -155.79),
    ("30", "Mountain View", "Hawaii", 19.55, -155.11),
    ("31", "Papaikou", "Hawaii", 19.79, -155.09),
    ("32", "Kurtistown", "Hawaii", 19.60, -155.06),
    ("33", "Ocean View", "Hawaii", 19.10, -155.77),
]

ATTRIBUTES = ["rainfall", "temperature", "soil_moisture", "solar", "wind_speed"]

# Per-island climate flavor: (wetness, warmth, windiness) multipliers.
ISLAND_FLAVOR = {
    "Kauai": (1.6, 0.98, 1.0),
    "Oahu": (0.9, 1.02, 1.1),
    "Molokai": (0.8, 1.0, 1.2),
    "Maui": (1.0, 1.0, 1.3),
    "Hawaii": (1.2, 0.97, 0.9),
}


def day_range():
    d = START
    while d <= END:
        yield d
        d += timedelta(days=1)


def series_value(rng, attr, wet, warm, windy, doy, station_offset):
    season = math.sin(2 * math.pi * (doy - 15) / 365.0)  # winter-wet, summer-dry
    if attr == "rainfall":
        base = max(0.0, rng.gamma(1.2, 4.0) * wet * (1.1 - 0.5 * season) - 1.5)
        return round(base, 2)
    if attr == "temperature":
        return round(22.0 * warm + 3.0 * season + station_offset + rng.normal(0, 1.2), 2)
    if attr == "soil_moisture":
        v = 0.28 * wet + 0.05 * (1 - season) + rng.normal(0, 0.04)
        return round(min(0.95, max(0.02, v)), 3)
    if attr == "solar":
        v = 210 + 70 * season + station_offset * 5 + rng.normal(0, 25)
        return round(max(40.0, v), 1)
    v = 4.5 * windy + 1.5 * math.sin(doy / 9.0) + rng.gamma(1.5, 1.0)
    return round(max(0.1, v), 2)


def main():
    rng = np.random.default_rng(SEED)
    out = Path(__file__).resolve().parents[1] / "data" / "hcdp_subset.csv"
    rows = []
    for sid, name, island, lat, lon in STATIONS:
        wet, warm, windy = ISLAND_FLAVOR[island]
        station_offset = rng.normal(0, 1.0)
        for attr in ATTRIBUTES:
            days = list(day_range())
            # Seeded sparse gaps; station 4's rainfall drops exactly 2024-03-15.
            if sid == "4" and attr == "rainfall":
                missing = {date(2024, 3, 15)}
            else:
                n_missing = int(rng.integers(0, 4))
                missing = set(rng.choice(len(days), size=n_missing, replace=False).tolist())
                missing = {days[i] for i in missing}
            for d in days:
                if d in missing:
                    continue
                value = series_value(rng, attr, wet, warm, windy, d.timetuple().tm_yday, station_offset)
                rows.append([sid, name, island, lat, lon, d.isoformat(), attr, value])

    with out.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["station_id", "station_name", "island", "latitude", "longitude", "date", "attribute", "value"]
        )
        writer.writerows(rows)
    print(f"wrote {len(rows)} records for {len(STATIONS)} stations to {out}")


if __name__ == "__main__":
    main()
