"""Ingestion of paired forecast/actual outdoor-temperature records.

The CSV contract is ``timestamp,forecast_c,actual_c`` with ISO-8601 local
timestamps (``YYYY-MM-DDTHH:MM``), UTF-8, decimal point, no thousands
separators.  Records are truncated to whole hours on ingest; coarser records
(e.g. 3-hourly) are densified onto the hourly grid by linear interpolation.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from datetime import date, datetime, timedelta

import numpy as np

from .errors import (
    AllGaps,
    EmptyInput,
    EmptySplit,
    MalformedRow,
    MissingColumn,
    UnsortedInput,
)

TEMP_SANITY_C = 60.0          # |temperature| beyond this is rejected as malformed
HOUR = timedelta(hours=1)

# Heating window: Nov 1 (inclusive) to Apr 1 (exclusive), month/day pairs.
DEFAULT_HEATING_WINDOW = ((11, 1), (4, 1))


@dataclass(frozen=True)
class TemperatureObservation:
    """One hourly (forecast, actual) pair."""

    timestamp: datetime
    forecast_c: float
    actual_c: float


@dataclass(frozen=True)
class PairedSeries:
    """Time-ordered hourly observations, plus any gaps left by resampling.

    ``gaps`` lists (start, end) record pairs whose span exceeded the resampling
    gap limit; no interior hours exist between them.
    """

    observations: tuple[TemperatureObservation, ...]
    gaps: tuple[tuple[datetime, datetime], ...] = field(default=())

    def __len__(self) -> int:
        return len(self.observations)

    def timestamps(self) -> list[datetime]:
        return [o.timestamp for o in self.observations]

    def forecasts(self) -> np.ndarray:
        return np.array([o.forecast_c for o in self.observations], dtype=float)

    def actuals(self) -> np.ndarray:
        return np.array([o.actual_c for o in self.observations], dtype=float)


@dataclass(frozen=True)
class DayForecast:
    """24 hourly forecast temperatures for one calendar day."""

    date: date
    temps_c: tuple[float, ...]

    def __post_init__(self):
        if len(self.temps_c) != 24:
            raise ValueError(f"day forecast needs 24 hourly values, got {len(self.temps_c)}")


def _truncate_to_hour(ts: datetime) -> datetime:
    return ts.replace(minute=0, second=0, microsecond=0)


def parse_temperature_csv(text) -> list[TemperatureObservation]:
    """Parse the temperature CSV contract from a string or text stream."""
    if isinstance(text, str):
        text = io.StringIO(text)
    reader = csv.reader(text)
    try:
        header = next(reader)
    except StopIteration:
        raise EmptyInput("no header row") from None
    header = [h.strip() for h in header]
    columns = {}
    for name in ("timestamp", "forecast_c", "actual_c"):
        if name not in header:
            raise MissingColumn(f"header lacks required column {name!r}")
        columns[name] = header.index(name)

    out: list[TemperatureObservation] = []
    for i, row in enumerate(reader, start=1):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) < len(header):
            raise MalformedRow(i, f"expected {len(header)} fields, got {len(row)}")
        raw_ts = row[columns["timestamp"]].strip()
        try:
            ts = datetime.fromisoformat(raw_ts)
        except ValueError:
            raise MalformedRow(i, f"bad timestamp {raw_ts!r}") from None
        if ts.tzinfo is not None:
            raise MalformedRow(i, "timestamps must be naive local time")
        values = {}
        for name in ("forecast_c", "actual_c"):
            raw = row[columns[name]].strip()
            try:
                values[name] = float(raw)
            except ValueError:
                raise MalformedRow(i, f"non-numeric {name} {raw!r}") from None
            if not np.isfinite(values[name]) or abs(values[name]) > TEMP_SANITY_C:
                raise MalformedRow(i, f"{name}={raw} outside +-{TEMP_SANITY_C:g} C")
        out.append(
            TemperatureObservation(_truncate_to_hour(ts), values["forecast_c"], values["actual_c"])
        )
    if not out:
        raise EmptyInput("no data rows")
    return out


def resample_hourly(records, max_gap_h: float) -> PairedSeries:
    """Densify time-sorted records onto the hourly grid by linear interpolation.

    Spans wider than ``max_gap_h`` hours are not filled; they are reported in
    the returned series' ``gaps``.
    """
    records = list(records)
    if max_gap_h < 1:
        raise ValueError("max_gap_h must be >= 1 hour")
    if not records:
        raise EmptyInput("no records to resample")
    for prev, cur in zip(records, records[1:]):
        if cur.timestamp <= prev.timestamp:
            raise UnsortedInput(
                f"timestamps not strictly increasing at {cur.timestamp.isoformat()}"
            )

    out: list[TemperatureObservation] = [records[0]]
    gaps: list[tuple[datetime, datetime]] = []
    interpolated_any = len(records) == 1
    for prev, cur in zip(records, records[1:]):
        span_h = (cur.timestamp - prev.timestamp) / HOUR
        if span_h > max_gap_h:
            gaps.append((prev.timestamp, cur.timestamp))
        else:
            interpolated_any = True
            steps = int(round(span_h))
            for k in range(1, steps):
                f = k / steps
                out.append(
                    TemperatureObservation(
                        prev.timestamp + k * HOUR,
                        prev.forecast_c + f * (cur.forecast_c - prev.forecast_c),
                        prev.actual_c + f * (cur.actual_c - prev.actual_c),
                    )
                )
        out.append(cur)
    if not interpolated_any:
        raise AllGaps(f"every span exceeds max_gap_h={max_gap_h:g}")
    return PairedSeries(tuple(out), tuple(gaps))


def in_heating_window(day: date, window=DEFAULT_HEATING_WINDOW) -> bool:
    """True if ``day`` falls inside the start-inclusive/end-exclusive window."""
    start, end = window
    key = (day.month, day.day)
    if start > end:  # window wraps the new year (the normal heating case)
        return key >= start or key < end
    return start <= key < end


def heating_window_subset(series: PairedSeries, window=DEFAULT_HEATING_WINDOW) -> PairedSeries:
    kept = tuple(o for o in series.observations if in_heating_window(o.timestamp.date(), window))
    return PairedSeries(kept)


def split_heating_seasons(
    series: PairedSeries, train_end: date, window=DEFAULT_HEATING_WINDOW
) -> tuple[PairedSeries, PairedSeries]:
    """Split the heating-window subset at ``train_end`` (train strictly before)."""
    train: list[TemperatureObservation] = []
    test: list[TemperatureObservation] = []
    for obs in series.observations:
        if not in_heating_window(obs.timestamp.date(), window):
            continue
        if obs.timestamp.date() < train_end:
            train.append(obs)
        else:
            test.append(obs)
    if not train or not test:
        side = "train" if not train else "test"
        raise EmptySplit(f"{side} side of the split at {train_end.isoformat()} is empty")
    return PairedSeries(tuple(train)), PairedSeries(tuple(test))


def read_day_forecast_csv(text) -> DayForecast:
    """Read a single-day forecast CSV with columns ``date,hour,forecast_c``."""
    if isinstance(text, str):
        text = io.StringIO(text)
    reader = csv.reader(text)
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise EmptyInput("no header row") from None
    for name in ("date", "hour", "forecast_c"):
        if name not in header:
            raise MissingColumn(f"header lacks required column {name!r}")
    i_date, i_hour, i_val = header.index("date"), header.index("hour"), header.index("forecast_c")
    temps: dict[int, float] = {}
    day: date | None = None
    for i, row in enumerate(reader, start=1):
        if not row or all(not cell.strip() for cell in row):
            continue
        try:
            d = date.fromisoformat(row[i_date].strip())
            hour = int(row[i_hour].strip())
            val = float(row[i_val].strip())
        except ValueError as exc:
            raise MalformedRow(i, str(exc)) from None
        if day is None:
            day = d
        elif d != day:
            raise MalformedRow(i, f"multiple dates in a single-day forecast ({day} vs {d})")
        if not 0 <= hour <= 23:
            raise MalformedRow(i, f"hour {hour} outside 0..23")
        if hour in temps:
            raise MalformedRow(i, f"duplicate hour {hour}")
        temps[hour] = val
    if day is None:
        raise EmptyInput("no data rows")
    if len(temps) != 24:
        missing = sorted(set(range(24)) - set(temps))
        raise EmptyInput(f"forecast day {day} missing hours {missing}")
    return DayForecast(day, tuple(temps[h] for h in range(24)))
