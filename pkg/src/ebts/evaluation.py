"""Scoring day-ahead plans against realized temperatures.

A plan is scored only through its bid: the dispatch LP is re-solved with the
bid pinned and the realized temperature profile as the single scenario.
Priced slack on the indoor comfort band keeps scoring total (a plan that
cannot hold comfort is charged, loudly, instead of failing), and the slack
charge is reported separately from the realized cost.

The module also carries a fully seeded synthetic weather generator (sinusoid
plus AR noise forecasts; actuals tied to forecasts through a Gaussian-copula
conditional draw) so end-to-end comparisons are reproducible bit for bit.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import date, datetime, timedelta

import numpy as np

from .config import CaseConfig, ScenarioSettings
from .copulas import FittedCopula
from .errors import DataError, EmptyInput, MalformedRow, MissingColumn, SolverInfeasible
from .lp import LpStatus, solve
from .model import (
    MarketParams,
    PlantParams,
    ScheduleSolution,
    build_stochastic_lp,
    extract_schedule,
)
from .scenarios import (
    N_HOURS,
    ScenarioSet,
    elbow_select,
    kmeans,
    sample_profiles,
    singleton_scenario_set,
    to_scenario_set,
)
from .weather import DayForecast, PairedSeries, TemperatureObservation

DEFAULT_SLACK_PRICE = 1e4  # currency per deg C * h; must exceed the marginal
                           # cost of holding comfort when holding it is possible


@dataclass(frozen=True, eq=False)
class RealizedResult:
    """Outcome of dispatching a fixed bid against a realized temperature day."""

    realized_cost: float
    comfort_violation: float     # deg C * h of comfort slack used
    slack_charge: float
    schedule: ScheduleSolution


def realized_dispatch(
    plant: PlantParams,
    buildings,
    market: MarketParams,
    bid,
    actual,
    slack_price: float = DEFAULT_SLACK_PRICE,
) -> RealizedResult:
    """Re-dispatch optimally with the bid fixed and the actual profile known."""
    bid = np.asarray(bid, dtype=float)
    actual = np.asarray(actual, dtype=float)
    if actual.shape != (N_HOURS,):
        raise DataError(f"actual profile needs {N_HOURS} hourly values")
    if not np.all(np.isfinite(bid)):
        raise DataError("bid must be finite")
    scen = singleton_scenario_set(actual)
    lp, index = build_stochastic_lp(
        plant, buildings, market, scen, fixed_bid=bid, comfort_slack_price=slack_price
    )
    sol = solve(lp)
    if sol.status is not LpStatus.OPTIMAL:
        rows = tuple(lp.row_name(i) for i in sol.infeasible_rows[:5])
        raise SolverInfeasible(
            f"realized dispatch LP is {sol.status.value}"
            + (f" (rows: {', '.join(rows)})" if rows else ""),
            rows,
        )
    sched = extract_schedule(sol, index, plant, buildings, market, scen)
    return RealizedResult(
        realized_cost=sched.expected_cost,
        comfort_violation=sched.comfort_violation,
        slack_charge=sched.slack_charge,
        schedule=sched,
    )


# --------------------------------------------------------------------------
# Planning helpers shared by the comparison harness and the CLI
# --------------------------------------------------------------------------

def generate_scenarios(
    model: FittedCopula,
    forecast: DayForecast,
    settings: ScenarioSettings,
    seed: int,
):
    """Sample a conditional pool and reduce it to a scenario set.

    Returns (scenario_set, pool, elbow_result_or_None).
    """
    pool = sample_profiles(
        model,
        forecast,
        settings.n_samples,
        ar_coefficient=settings.ar_coefficient,
        seed=seed,
    )
    if settings.k == "auto":
        k_hi = min(settings.k_max, settings.n_samples)
        elbow = elbow_select(
            pool.profiles,
            (settings.k_min, k_hi),
            seed=seed + 1,
            n_restarts=settings.n_restarts,
        )
        k = elbow.k_star
    else:
        elbow = None
        k = int(settings.k)
    km = kmeans(pool.profiles, k, seed=seed + 2, n_restarts=settings.n_restarts)
    scen = to_scenario_set(
        km.centroids, km.assignment, equal_probabilities=settings.equal_probabilities
    )
    return scen, pool, elbow


def plan_stochastic(case: CaseConfig, scen: ScenarioSet) -> ScheduleSolution:
    lp, index = build_stochastic_lp(case.plant, case.buildings, case.market, scen)
    sol = solve(lp)
    if sol.status is not LpStatus.OPTIMAL:
        rows = tuple(lp.row_name(i) for i in sol.infeasible_rows[:5])
        raise SolverInfeasible(
            f"scheduling LP is {sol.status.value}"
            + (f" (rows: {', '.join(rows)})" if rows else ""),
            rows,
        )
    return extract_schedule(sol, index, case.plant, case.buildings, case.market, scen)


def plan_deterministic(case: CaseConfig, forecast: DayForecast) -> ScheduleSolution:
    scen = singleton_scenario_set(np.asarray(forecast.temps_c, dtype=float))
    return plan_stochastic(case, scen)


# --------------------------------------------------------------------------
# Method comparison across test days
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DayResult:
    day: date
    stochastic_cost: float           # realized, out of sample
    deterministic_cost: float
    stochastic_violation: float
    deterministic_violation: float
    stochastic_insample: float       # planner's own expected cost
    deterministic_insample: float
    n_scenarios: int
    stochastic_seconds: float = 0.0
    deterministic_seconds: float = 0.0


@dataclass(frozen=True, eq=False)
class ComparisonReport:
    days: tuple[DayResult, ...]

    @property
    def mean_stochastic(self) -> float:
        return float(np.mean([d.stochastic_cost for d in self.days]))

    @property
    def mean_deterministic(self) -> float:
        return float(np.mean([d.deterministic_cost for d in self.days]))

    @property
    def stochastic_seconds(self) -> float:
        return float(sum(d.stochastic_seconds for d in self.days))

    @property
    def deterministic_seconds(self) -> float:
        return float(sum(d.deterministic_seconds for d in self.days))


def _evaluate_one_day(model, day_forecast, actual, case, settings, seed, slack_price):
    import time as _time

    t0 = _time.perf_counter()
    scen, _, _ = generate_scenarios(model, day_forecast, settings, seed)
    stoch_plan = plan_stochastic(case, scen)
    t_stoch_plan = _time.perf_counter() - t0

    t0 = _time.perf_counter()
    det_plan = plan_deterministic(case, day_forecast)
    t_det_plan = _time.perf_counter() - t0

    t0 = _time.perf_counter()
    stoch_real = realized_dispatch(
        case.plant, case.buildings, case.market, stoch_plan.bid, actual, slack_price
    )
    t_stoch = t_stoch_plan + (_time.perf_counter() - t0)

    t0 = _time.perf_counter()
    det_real = realized_dispatch(
        case.plant, case.buildings, case.market, det_plan.bid, actual, slack_price
    )
    t_det = t_det_plan + (_time.perf_counter() - t0)

    return DayResult(
        day=day_forecast.date,
        stochastic_cost=stoch_real.realized_cost,
        deterministic_cost=det_real.realized_cost,
        stochastic_violation=stoch_real.comfort_violation,
        deterministic_violation=det_real.comfort_violation,
        stochastic_insample=stoch_plan.expected_cost,
        deterministic_insample=det_plan.expected_cost,
        n_scenarios=scen.n_scenarios,
        stochastic_seconds=t_stoch,
        deterministic_seconds=t_det,
    )


def compare_methods(
    model: FittedCopula,
    test_days,
    case: CaseConfig,
    settings: ScenarioSettings | None = None,
    seed: int = 0,
    slack_price: float = DEFAULT_SLACK_PRICE,
    threads: int = 1,
) -> ComparisonReport:
    """Plan both methods for each (forecast, actual) day and score both.

    Day i derives its sampling seed as seed + 1000 * i, so reports are
    reproducible and days may be evaluated in parallel and merged in order.
    """
    test_days = list(test_days)
    if not test_days:
        raise EmptyInput("no test days supplied")
    if settings is None:
        settings = case.scenario

    def job(i_day):
        i, (day_forecast, actual) = i_day
        return _evaluate_one_day(
            model, day_forecast, np.asarray(actual, dtype=float), case, settings,
            seed + 1000 * i, slack_price,
        )

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(job, enumerate(test_days)))
    else:
        results = [job(item) for item in enumerate(test_days)]
    return ComparisonReport(days=tuple(results))


def comparison_to_csv(report: ComparisonReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["day", "stochastic_cost", "deterministic_cost", "stoch_violation", "det_violation"]
    )
    for d in report.days:
        writer.writerow(
            [
                d.day.isoformat(),
                repr(float(d.stochastic_cost)),
                repr(float(d.deterministic_cost)),
                repr(float(d.stochastic_violation)),
                repr(float(d.deterministic_violation)),
            ]
        )
    writer.writerow(
        ["mean", repr(report.mean_stochastic), repr(report.mean_deterministic), "", ""]
    )
    return buf.getvalue()


def comparison_to_long_csv(report: ComparisonReport) -> str:
    """Plot-ready long format: one (day, method, metric, value) row each."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["day", "method", "metric", "value"])
    for d in report.days:
        rows = [
            (d.day.isoformat(), "stochastic", "realized_cost", d.stochastic_cost),
            (d.day.isoformat(), "deterministic", "realized_cost", d.deterministic_cost),
            (d.day.isoformat(), "stochastic", "insample_cost", d.stochastic_insample),
            (d.day.isoformat(), "deterministic", "insample_cost", d.deterministic_insample),
            (d.day.isoformat(), "stochastic", "comfort_violation", d.stochastic_violation),
            (d.day.isoformat(), "deterministic", "comfort_violation", d.deterministic_violation),
        ]
        for day, method, metric, value in rows:
            writer.writerow([day, method, metric, repr(float(value))])
    return buf.getvalue()


# --------------------------------------------------------------------------
# Synthetic weather (substitute for the unavailable historical record)
# --------------------------------------------------------------------------

SYNTH_RHO = 0.85          # forecast/actual Gaussian-copula correlation
SYNTH_SIGMA_C = 4.0       # hourly anomaly scale, deg C
SYNTH_AR = 0.9            # hourly AR(1) coefficient of the anomaly paths
SYNTH_BASE_C = -6.0       # midwinter mean
SYNTH_SEASON_AMP_C = 6.0  # seasonal swing around the base
SYNTH_DIURNAL_AMP_C = 4.0


def _season_mean(day_of_season: float, hour: np.ndarray) -> np.ndarray:
    seasonal = SYNTH_BASE_C + SYNTH_SEASON_AMP_C * np.cos(
        2.0 * np.pi * (day_of_season - 75.0) / 151.0
    )
    diurnal = SYNTH_DIURNAL_AMP_C * np.sin(2.0 * np.pi * (hour - 9.0) / 24.0)
    return seasonal + diurnal


def _anomaly_paths(rng: np.random.Generator, n_hours: int) -> tuple[np.ndarray, np.ndarray]:
    """Correlated (forecast, actual) standard-normal anomaly paths."""
    zf = np.empty(n_hours)
    eps = np.empty(n_hours)
    innov = np.sqrt(1.0 - SYNTH_AR**2)
    zf[0] = rng.standard_normal()
    eps[0] = rng.standard_normal()
    for t in range(1, n_hours):
        zf[t] = SYNTH_AR * zf[t - 1] + innov * rng.standard_normal()
        eps[t] = SYNTH_AR * eps[t - 1] + innov * rng.standard_normal()
    za = SYNTH_RHO * zf + np.sqrt(1.0 - SYNTH_RHO**2) * eps
    return zf, za


def synthetic_history(
    seed: int,
    start: date = date(2016, 11, 1),
    n_days: int = 500,
) -> PairedSeries:
    """Hourly paired forecast/actual series over ``n_days`` consecutive days.

    Forecast = seasonal + diurnal sinusoid + AR(1) anomaly; actual anomaly is
    a Gaussian-copula (rho = 0.85) conditional of the forecast anomaly.
    """
    rng = np.random.default_rng(seed)
    hours = np.arange(24)
    observations = []
    for d in range(n_days):
        day = start + timedelta(days=d)
        day_of_season = (day - start).days % 365
        mean = _season_mean(day_of_season, hours)
        zf, za = _anomaly_paths(rng, 24)
        forecast = mean + SYNTH_SIGMA_C * zf
        actual = mean + SYNTH_SIGMA_C * za
        forecast = np.clip(forecast, -45.0, 45.0)
        actual = np.clip(actual, -45.0, 45.0)
        for h in hours:
            observations.append(
                TemperatureObservation(
                    datetime(day.year, day.month, day.day, int(h)),
                    float(forecast[h]),
                    float(actual[h]),
                )
            )
    return PairedSeries(tuple(observations))


def synthetic_test_days(
    seed: int,
    n_days: int,
    start: date = date(2020, 12, 1),
) -> list[tuple[DayForecast, np.ndarray]]:
    """Seeded (forecast, actual) pairs for out-of-sample comparison runs."""
    rng = np.random.default_rng(seed)
    hours = np.arange(24)
    out = []
    for d in range(n_days):
        day = start + timedelta(days=d)
        day_of_season = (day - date(day.year if day.month >= 11 else day.year - 1, 11, 1)).days
        mean = _season_mean(float(day_of_season % 365), hours)
        zf, za = _anomaly_paths(rng, 24)
        forecast = mean + SYNTH_SIGMA_C * zf
        actual = mean + SYNTH_SIGMA_C * za
        out.append(
            (DayForecast(day, tuple(float(x) for x in forecast)), actual.astype(float))
        )
    return out


def paired_series_to_csv(series: PairedSeries) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["timestamp", "forecast_c", "actual_c"])
    for obs in series.observations:
        writer.writerow(
            [
                obs.timestamp.strftime("%Y-%m-%dT%H:%M"),
                repr(float(obs.forecast_c)),
                repr(float(obs.actual_c)),
            ]
        )
    return buf.getvalue()


def test_days_to_csv(days) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["date", "hour", "forecast_c", "actual_c"])
    for day_forecast, actual in days:
        for h in range(N_HOURS):
            writer.writerow(
                [
                    day_forecast.date.isoformat(),
                    h,
                    repr(float(day_forecast.temps_c[h])),
                    repr(float(actual[h])),
                ]
            )
    return buf.getvalue()


def read_test_days_csv(text) -> list[tuple[DayForecast, np.ndarray]]:
    """Read ``date,hour,forecast_c,actual_c`` rows grouped into whole days."""
    if isinstance(text, str):
        text = io.StringIO(text)
    reader = csv.reader(text)
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise EmptyInput("no header row") from None
    for name in ("date", "hour", "forecast_c", "actual_c"):
        if name not in header:
            raise MissingColumn(f"header lacks required column {name!r}")
    cols = {name: header.index(name) for name in header}
    per_day: dict[date, dict[int, tuple[float, float]]] = {}
    for i, row in enumerate(reader, start=1):
        if not row or all(not c.strip() for c in row):
            continue
        try:
            d = date.fromisoformat(row[cols["date"]].strip())
            h = int(row[cols["hour"]].strip())
            f = float(row[cols["forecast_c"]].strip())
            a = float(row[cols["actual_c"]].strip())
        except ValueError as exc:
            raise MalformedRow(i, str(exc)) from None
        if not 0 <= h <= 23:
            raise MalformedRow(i, f"hour {h} outside 0..23")
        per_day.setdefault(d, {})[h] = (f, a)
    if not per_day:
        raise EmptyInput("no data rows")
    out = []
    for d in sorted(per_day):
        hours = per_day[d]
        if len(hours) != N_HOURS:
            missing = sorted(set(range(N_HOURS)) - set(hours))
            raise DataError(f"day {d} missing hours {missing}")
        forecast = DayForecast(d, tuple(hours[h][0] for h in range(N_HOURS)))
        actual = np.array([hours[h][1] for h in range(N_HOURS)])
        out.append((forecast, actual))
    return out
