"""Two-stage stochastic LP for boiler-with-storage day-ahead scheduling.

First stage: the declared hourly consumption bid.  Second stage, per
temperature scenario: boiler consumption, storage charge/discharge and level,
building inlet-water and indoor temperatures, and deviation slacks around the
bid.  The objective is expected energy cost minus balancing revenue plus the
deviation penalty outside the deadband.

Outlet-water temperature and radiator emission are eliminated variables:
with the radiator mixing identity T_out = (1 - theta) T_in + theta T_bld, the
emission is D = mdot_c * theta * (T_in - T_bld), and outlet limits become
linear constraints on (T_in, T_bld).

Units are MW, MWh, hours, and deg C throughout.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InconsistentDimensions, InvariantViolation, NonpositiveFlow, NotOptimal
from .lp import EQUAL, GREATER, LESS, LinearProgram, LpSolution, LpStatus
from .scenarios import N_HOURS, ScenarioSet, singleton_scenario_set
from .weather import DayForecast

# Bound re-check slack for extracted solutions, in native units.
_EXTRACT_TOL = 1e-6


@dataclass(frozen=True)
class PlantParams:
    """Aggregate boiler + storage-tank parameters."""

    p_min: float
    p_max: float
    eta: float
    h_min: float
    h_max: float
    p_str_max: float
    p_rls_max: float
    p_str_min: float = 0.0
    p_rls_min: float = 0.0
    retention: float = 1.0        # fraction of stored heat surviving one hour
    h_initial: float | None = None  # defaults to h_min
    terminal_rule: str = "cyclic"   # "cyclic" (end >= start) or "free"
    delta_t: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.eta <= 1.0:
            raise ValueError("eta must lie in (0, 1]")
        if not 0.0 < self.retention <= 1.0:
            raise ValueError("retention must lie in (0, 1]")
        for lo, hi, what in (
            (self.p_min, self.p_max, "consumption"),
            (self.h_min, self.h_max, "storage energy"),
            (self.p_str_min, self.p_str_max, "storage charge"),
            (self.p_rls_min, self.p_rls_max, "storage discharge"),
        ):
            if lo > hi:
                raise ValueError(f"{what}: min {lo} > max {hi}")
        if self.terminal_rule not in ("cyclic", "free"):
            raise ValueError("terminal_rule must be 'cyclic' or 'free'")
        h0 = self.start_energy
        if not self.h_min <= h0 <= self.h_max:
            raise ValueError("h_initial must lie within [h_min, h_max]")
        if self.delta_t <= 0.0:
            raise ValueError("delta_t must be positive")

    @property
    def start_energy(self) -> float:
        return self.h_min if self.h_initial is None else self.h_initial


@dataclass(frozen=True)
class BuildingParams:
    """One building with its radiator loop."""

    c_bld: float       # MWh per deg C
    u: float           # MW per deg C conductance to outdoors
    mdot_c: float      # MW per deg C, mass flow times specific heat
    theta: float       # radiator heat-dissipation effectiveness, in (0, 1)
    t_bld_initial: float
    t_bld_min: float
    t_bld_max: float
    t_in_min: float
    t_in_max: float
    t_out_min: float
    t_out_max: float
    name: str = ""

    def __post_init__(self):
        if self.c_bld <= 0.0 or self.u < 0.0 or self.mdot_c <= 0.0:
            raise ValueError("c_bld and mdot_c must be positive, u nonnegative")
        if not 0.0 < self.theta < 1.0:
            raise ValueError("theta must lie in (0, 1)")
        for lo, hi, what in (
            (self.t_bld_min, self.t_bld_max, "indoor temperature"),
            (self.t_in_min, self.t_in_max, "inlet temperature"),
            (self.t_out_min, self.t_out_max, "outlet temperature"),
        ):
            if lo > hi:
                raise ValueError(f"{what}: min {lo} > max {hi}")
        if not self.t_bld_min <= self.t_bld_initial <= self.t_bld_max:
            raise ValueError("t_bld_initial must lie in the comfort band")


@dataclass(frozen=True, eq=False)
class MarketParams:
    """Hourly prices, baseline, and penalty deadband."""

    c_e: np.ndarray       # energy price per MWh
    c_r: np.ndarray       # balancing compensation per MWh of bid above baseline
    c_f: np.ndarray       # deviation penalty per MWh outside the deadband
    baseline: np.ndarray  # grid-recognized reference consumption, MW
    epsilon: float        # penalty-free deviation band, MW

    def __post_init__(self):
        for label, arr in (
            ("c_e", self.c_e),
            ("c_r", self.c_r),
            ("c_f", self.c_f),
            ("baseline", self.baseline),
        ):
            if np.asarray(arr).shape != (N_HOURS,):
                raise ValueError(f"{label} needs exactly {N_HOURS} hourly values")
        if self.epsilon < 0.0:
            raise ValueError("epsilon must be nonnegative")
        if np.any(self.c_f < 0.0):
            # The deadband linearization is exact only for nonnegative
            # penalty prices.
            raise ValueError("c_f must be nonnegative in every hour")


def radiator_theta(kf: float, mdot_c: float) -> float:
    """Radiator effectiveness 1 - exp(-kf / mdot_c); result in [0, 1)."""
    if mdot_c <= 0.0:
        raise NonpositiveFlow(f"mdot_c must be positive, got {mdot_c}")
    if kf < 0.0:
        raise ValueError("kf must be nonnegative")
    return 1.0 - math.exp(-kf / mdot_c)


# --------------------------------------------------------------------------
# LP assembly
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ScheduleIndex:
    """Variable layout of one scheduling LP plus objective bookkeeping.

    ``t_bld`` holds end-of-hour indoor temperatures (hour n's state after the
    hour-n heat exchange); the start-of-day value is the constant
    ``t_bld_initial`` of each building.
    """

    n_scenarios: int
    n_buildings: int
    bid: np.ndarray                 # (24,)
    p: np.ndarray                   # (S, 24)
    p_str: np.ndarray
    p_rls: np.ndarray
    h: np.ndarray                   # (S, 24) end-of-hour storage energy
    dev_hi: np.ndarray              # (S, 24) consumption above bid + deadband
    dev_lo: np.ndarray              # (S, 24) consumption below bid - deadband
    t_in: np.ndarray                # (S, M, 24)
    t_bld: np.ndarray               # (S, M, 24)
    comfort_lo: np.ndarray | None   # (S, M, 24) slack below the comfort band
    comfort_hi: np.ndarray | None
    comfort_slack_price: float | None
    objective_offset: float         # constant revenue term c_r . baseline
    n_vars: int

    @property
    def has_comfort_slack(self) -> bool:
        return self.comfort_lo is not None


def build_stochastic_lp(
    plant: PlantParams,
    buildings,
    market: MarketParams,
    scenarios: ScenarioSet,
    fixed_bid=None,
    comfort_slack_price: float | None = None,
) -> tuple[LinearProgram, ScheduleIndex]:
    """Assemble the scenario-expected scheduling LP.

    ``fixed_bid`` pins the first-stage bid (used when scoring a known plan);
    ``comfort_slack_price`` adds priced slacks on the indoor comfort band so
    evaluation never reports hard infeasibility.
    """
    buildings = tuple(buildings)
    S = scenarios.n_scenarios
    M = len(buildings)
    if M == 0:
        raise InconsistentDimensions("at least one building is required")
    if scenarios.profiles.shape[1] != N_HOURS:
        raise InconsistentDimensions("scenario profiles must span 24 hours")
    if fixed_bid is not None:
        fixed_bid = np.asarray(fixed_bid, dtype=float)
        if fixed_bid.shape != (N_HOURS,):
            raise InconsistentDimensions("fixed bid needs 24 hourly values")
    dt = plant.delta_t

    n_base = N_HOURS + S * N_HOURS * (6 + 2 * M)
    n_slack = 2 * S * M * N_HOURS if comfort_slack_price is not None else 0
    lp = LinearProgram(n_base + n_slack)

    counter = 0

    def take(shape) -> np.ndarray:
        nonlocal counter
        size = int(np.prod(shape))
        block = np.arange(counter, counter + size).reshape(shape)
        counter += size
        return block

    bid = take(N_HOURS)
    p = take((S, N_HOURS))
    p_str = take((S, N_HOURS))
    p_rls = take((S, N_HOURS))
    h = take((S, N_HOURS))
    dev_hi = take((S, N_HOURS))
    dev_lo = take((S, N_HOURS))
    t_in = take((S, M, N_HOURS))
    t_bld = take((S, M, N_HOURS))
    comfort_lo = comfort_hi = None
    if comfort_slack_price is not None:
        comfort_lo = take((S, M, N_HOURS))
        comfort_hi = take((S, M, N_HOURS))
    assert counter == lp.n_vars

    # Bounds.  The bid is itself a consumption plan, so plant limits apply.
    for n in range(N_HOURS):
        if fixed_bid is not None:
            lp.set_bounds(bid[n], fixed_bid[n], fixed_bid[n])
        else:
            lp.set_bounds(bid[n], plant.p_min, plant.p_max)
    for s in range(S):
        for n in range(N_HOURS):
            lp.set_bounds(p[s, n], plant.p_min, plant.p_max)
            lp.set_bounds(p_str[s, n], plant.p_str_min, plant.p_str_max)
            lp.set_bounds(p_rls[s, n], plant.p_rls_min, plant.p_rls_max)
            lp.set_bounds(h[s, n], plant.h_min, plant.h_max)
            # dev_hi / dev_lo keep their [0, inf) defaults.
    for s in range(S):
        for m, bld in enumerate(buildings):
            for n in range(N_HOURS):
                lp.set_bounds(t_in[s, m, n], bld.t_in_min, bld.t_in_max)
                if comfort_slack_price is None:
                    lp.set_bounds(t_bld[s, m, n], bld.t_bld_min, bld.t_bld_max)
                else:
                    # Wide box; the comfort band moves into slack rows.
                    lp.set_bounds(t_bld[s, m, n], -100.0, 150.0)

    probs = scenarios.probabilities
    for s in range(S):
        w = float(probs[s])
        for n in range(N_HOURS):
            lp.objective[p[s, n]] += w * market.c_e[n]
            lp.objective[dev_hi[s, n]] += w * market.c_f[n]
            lp.objective[dev_lo[s, n]] += w * market.c_f[n]
    for n in range(N_HOURS):
        lp.objective[bid[n]] -= market.c_r[n]
    if comfort_slack_price is not None:
        for s in range(S):
            w = float(probs[s])
            lp.objective[comfort_lo[s].ravel()] += w * comfort_slack_price
            lp.objective[comfort_hi[s].ravel()] += w * comfort_slack_price
    offset = float(market.c_r @ market.baseline)

    emission = np.array([b.mdot_c * b.theta for b in buildings])

    for s in range(S):
        t_env = scenarios.profiles[s]
        for n in range(N_HOURS):
            # Heat balance: eta P - Pstr + Prls = sum_m D_m, with
            # D_m = emission_m (T_in - T_bld_start).
            idx = [p[s, n], p_str[s, n], p_rls[s, n]]
            coeff = [plant.eta, -1.0, 1.0]
            rhs = 0.0
            for m, bld in enumerate(buildings):
                idx.append(t_in[s, m, n])
                coeff.append(-emission[m])
                if n == 0:
                    rhs -= emission[m] * bld.t_bld_initial
                else:
                    idx.append(t_bld[s, m, n - 1])
                    coeff.append(emission[m])
            lp.add_constraint(idx, coeff, EQUAL, rhs, name=f"balance[s{s},h{n}]")

            # Storage recursion H_n = v H_{n-1} + (Pstr - Prls) dt.
            idx = [h[s, n], p_str[s, n], p_rls[s, n]]
            coeff = [1.0, -dt, dt]
            rhs = 0.0
            if n == 0:
                rhs = plant.retention * plant.start_energy
            else:
                idx.append(h[s, n - 1])
                coeff.append(-plant.retention)
            lp.add_constraint(idx, coeff, EQUAL, rhs, name=f"storage[s{s},h{n}]")

            for m, bld in enumerate(buildings):
                # Building energy balance over hour n:
                # c_bld (T_end - T_start) = dt [u (T_env - T_start) + D].
                start_coeff = -bld.c_bld + dt * bld.u + dt * emission[m]
                idx = [t_bld[s, m, n], t_in[s, m, n]]
                coeff = [bld.c_bld, -dt * emission[m]]
                rhs = dt * bld.u * t_env[n]
                if n == 0:
                    rhs -= start_coeff * bld.t_bld_initial
                else:
                    idx.append(t_bld[s, m, n - 1])
                    coeff.append(start_coeff)
                lp.add_constraint(idx, coeff, EQUAL, rhs, name=f"building[s{s},m{m},h{n}]")

                # Outlet-water limits on (1 - theta) T_in + theta T_bld_start.
                one_minus = 1.0 - bld.theta
                if n == 0:
                    base = bld.theta * bld.t_bld_initial
                    lp.add_constraint(
                        [t_in[s, m, n]], [one_minus], LESS, bld.t_out_max - base,
                        name=f"outlet_hi[s{s},m{m},h{n}]",
                    )
                    lp.add_constraint(
                        [t_in[s, m, n]], [one_minus], GREATER, bld.t_out_min - base,
                        name=f"outlet_lo[s{s},m{m},h{n}]",
                    )
                else:
                    pair = [t_in[s, m, n], t_bld[s, m, n - 1]]
                    pc = [one_minus, bld.theta]
                    lp.add_constraint(pair, pc, LESS, bld.t_out_max,
                                      name=f"outlet_hi[s{s},m{m},h{n}]")
                    lp.add_constraint(pair, pc, GREATER, bld.t_out_min,
                                      name=f"outlet_lo[s{s},m{m},h{n}]")

                if comfort_slack_price is not None:
                    lp.add_constraint(
                        [t_bld[s, m, n], comfort_hi[s, m, n]], [1.0, -1.0],
                        LESS, bld.t_bld_max, name=f"comfort_hi[s{s},m{m},h{n}]",
                    )
                    lp.add_constraint(
                        [t_bld[s, m, n], comfort_lo[s, m, n]], [1.0, 1.0],
                        GREATER, bld.t_bld_min, name=f"comfort_lo[s{s},m{m},h{n}]",
                    )

            # Deadband linearization of the deviation penalty.
            lp.add_constraint(
                [p[s, n], bid[n], dev_hi[s, n]], [1.0, -1.0, -1.0],
                LESS, market.epsilon, name=f"dev_hi[s{s},h{n}]",
            )
            lp.add_constraint(
                [bid[n], p[s, n], dev_lo[s, n]], [1.0, -1.0, -1.0],
                LESS, market.epsilon, name=f"dev_lo[s{s},h{n}]",
            )

        if plant.terminal_rule == "cyclic":
            lp.add_constraint(
                [h[s, N_HOURS - 1]], [1.0], GREATER, plant.start_energy,
                name=f"terminal[s{s}]",
            )

    index = ScheduleIndex(
        n_scenarios=S,
        n_buildings=M,
        bid=bid,
        p=p,
        p_str=p_str,
        p_rls=p_rls,
        h=h,
        dev_hi=dev_hi,
        dev_lo=dev_lo,
        t_in=t_in,
        t_bld=t_bld,
        comfort_lo=comfort_lo,
        comfort_hi=comfort_hi,
        comfort_slack_price=comfort_slack_price,
        objective_offset=offset,
        n_vars=lp.n_vars,
    )
    return lp, index


def build_deterministic_lp(
    plant: PlantParams,
    buildings,
    market: MarketParams,
    forecast: DayForecast,
    fixed_bid=None,
    comfort_slack_price: float | None = None,
) -> tuple[LinearProgram, ScheduleIndex]:
    """Single-scenario model fed by the pointwise forecast."""
    scen = singleton_scenario_set(np.asarray(forecast.temps_c, dtype=float))
    return build_stochastic_lp(
        plant, buildings, market, scen,
        fixed_bid=fixed_bid, comfort_slack_price=comfort_slack_price,
    )


# --------------------------------------------------------------------------
# Solution extraction
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ScheduleSolution:
    """Interpreted LP solution with derived quantities and cost breakdown."""

    bid: np.ndarray                    # (24,)
    probabilities: np.ndarray          # (S,)
    p: np.ndarray                      # (S, 24)
    p_str: np.ndarray
    p_rls: np.ndarray
    h: np.ndarray                      # (S, 24) end-of-hour storage energy
    t_in: np.ndarray                   # (S, M, 24)
    t_out: np.ndarray                  # (S, M, 24), reconstructed
    t_bld: np.ndarray                  # (S, M, 25), start-of-day + hourly ends
    emission: np.ndarray               # (S, M, 24) heat delivered, MW
    energy_cost: np.ndarray            # (S,)
    penalty_cost: np.ndarray           # (S,)
    revenue: float
    expected_cost: float
    comfort_violation: float = 0.0     # deg C * h of comfort slack used
    slack_charge: float = 0.0
    simultaneous_hours: tuple = ()     # (s, n) with charge and discharge both on

    @property
    def n_scenarios(self) -> int:
        return self.p.shape[0]


def extract_schedule(
    solution: LpSolution,
    index: ScheduleIndex,
    plant: PlantParams,
    buildings,
    market: MarketParams,
    scenarios: ScenarioSet,
) -> ScheduleSolution:
    """Re-validate and interpret an optimal LP solution.

    Every bound and the hourly heat balance are re-checked from the raw
    constraint formulas, independent of the solver's own residual checks; the
    cost breakdown is recomputed from prices and matched to the solver
    objective.
    """
    if solution.status is not LpStatus.OPTIMAL:
        raise NotOptimal(f"cannot extract a schedule from status {solution.status.value}")
    buildings = tuple(buildings)
    x = solution.values
    S, M = index.n_scenarios, index.n_buildings
    dt = plant.delta_t

    bid = x[index.bid]
    p = x[index.p]
    p_str = x[index.p_str]
    p_rls = x[index.p_rls]
    h = x[index.h]
    t_in = x[index.t_in]
    t_bld_end = x[index.t_bld]

    t_bld = np.empty((S, M, N_HOURS + 1))
    for m, bld in enumerate(buildings):
        t_bld[:, m, 0] = bld.t_bld_initial
    t_bld[:, :, 1:] = t_bld_end

    emission_coef = np.array([b.mdot_c * b.theta for b in buildings])
    emission = emission_coef[None, :, None] * (t_in - t_bld[:, :, :-1])
    theta = np.array([b.theta for b in buildings])
    t_out = (1.0 - theta)[None, :, None] * t_in + theta[None, :, None] * t_bld[:, :, :-1]

    def check(ok: bool, what: str):
        if not ok:
            raise InvariantViolation(what)

    # Bound re-checks from declared parameters.
    check(np.all(p >= plant.p_min - _EXTRACT_TOL) and np.all(p <= plant.p_max + _EXTRACT_TOL),
          "consumption outside plant range")
    check(np.all(p_str >= plant.p_str_min - _EXTRACT_TOL)
          and np.all(p_str <= plant.p_str_max + _EXTRACT_TOL), "charge outside range")
    check(np.all(p_rls >= plant.p_rls_min - _EXTRACT_TOL)
          and np.all(p_rls <= plant.p_rls_max + _EXTRACT_TOL), "discharge outside range")
    check(np.all(h >= plant.h_min - _EXTRACT_TOL) and np.all(h <= plant.h_max + _EXTRACT_TOL),
          "storage energy outside range")
    for m, bld in enumerate(buildings):
        check(np.all(t_in[:, m, :] >= bld.t_in_min - _EXTRACT_TOL)
              and np.all(t_in[:, m, :] <= bld.t_in_max + _EXTRACT_TOL),
              f"inlet temperature outside range (building {m})")
        check(np.all(t_out[:, m, :] >= bld.t_out_min - _EXTRACT_TOL)
              and np.all(t_out[:, m, :] <= bld.t_out_max + _EXTRACT_TOL),
              f"outlet temperature outside range (building {m})")
        if not index.has_comfort_slack:
            check(np.all(t_bld_end[:, m, :] >= bld.t_bld_min - _EXTRACT_TOL)
                  and np.all(t_bld_end[:, m, :] <= bld.t_bld_max + _EXTRACT_TOL),
                  f"indoor temperature outside comfort band (building {m})")

    # Hourly heat balance residual.
    balance = plant.eta * p - p_str + p_rls - emission.sum(axis=1)
    check(float(np.abs(balance).max()) < 1e-6, "heat balance residual exceeds 1e-6 MW")

    # Storage recursion residual.
    h_prev = np.concatenate(
        [np.full((S, 1), plant.start_energy), h[:, :-1]], axis=1
    )
    storage_resid = h - plant.retention * h_prev - dt * (p_str - p_rls)
    check(float(np.abs(storage_resid).max()) < 1e-6, "storage recursion residual")

    # Cost breakdown straight from prices (not from slack variables).
    energy_cost = p @ market.c_e
    dev = np.abs(p - bid[None, :]) - market.epsilon
    penalty_cost = np.maximum(dev, 0.0) @ market.c_f
    revenue = float(market.c_r @ (bid - market.baseline))
    probs = scenarios.probabilities
    expected = float(probs @ (energy_cost + penalty_cost) - revenue)

    comfort_violation = 0.0
    slack_charge = 0.0
    if index.has_comfort_slack:
        slack_lo = x[index.comfort_lo]
        slack_hi = x[index.comfort_hi]
        per_scenario = (slack_lo + slack_hi).sum(axis=(1, 2))
        comfort_violation = float(probs @ per_scenario) * dt
        slack_charge = float(index.comfort_slack_price) * comfort_violation

    # Slack pricing belongs to the LP objective but not to the reported cost.
    lp_total = solution.objective_value + index.objective_offset
    recomputed = expected + slack_charge
    rel = abs(recomputed - lp_total) / max(1.0, abs(lp_total))
    check(rel < 1e-6, f"cost breakdown mismatch: {recomputed} vs LP {lp_total}")

    simultaneous = tuple(
        (int(s), int(n))
        for s, n in zip(*np.where((p_str > 1e-6) & (p_rls > 1e-6)))
    )

    return ScheduleSolution(
        bid=bid.copy(),
        probabilities=probs.copy(),
        p=p.copy(),
        p_str=p_str.copy(),
        p_rls=p_rls.copy(),
        h=h.copy(),
        t_in=t_in.copy(),
        t_out=t_out,
        t_bld=t_bld,
        emission=emission,
        energy_cost=energy_cost,
        penalty_cost=penalty_cost,
        revenue=revenue,
        expected_cost=expected,
        comfort_violation=comfort_violation,
        slack_charge=slack_charge,
        simultaneous_hours=simultaneous,
    )


# --------------------------------------------------------------------------
# CSV exports
# --------------------------------------------------------------------------

def schedule_to_csv(sched: ScheduleSolution) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["hour", "bid_mw", "scenario", "p_mw", "p_str_mw", "p_rls_mw", "h_mwh"])
    for s in range(sched.n_scenarios):
        for n in range(N_HOURS):
            writer.writerow(
                [
                    n + 1,
                    repr(float(sched.bid[n])),
                    s,
                    repr(float(sched.p[s, n])),
                    repr(float(sched.p_str[s, n])),
                    repr(float(sched.p_rls[s, n])),
                    repr(float(sched.h[s, n])),
                ]
            )
    return buf.getvalue()


def building_temps_to_csv(sched: ScheduleSolution) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["scenario", "building", "hour", "t_in_c", "t_out_c", "t_bld_c", "emission_mw"]
    )
    S, M, _ = sched.t_in.shape
    for s in range(S):
        for m in range(M):
            for n in range(N_HOURS):
                writer.writerow(
                    [
                        s,
                        m + 1,
                        n + 1,
                        repr(float(sched.t_in[s, m, n])),
                        repr(float(sched.t_out[s, m, n])),
                        repr(float(sched.t_bld[s, m, n + 1])),
                        repr(float(sched.emission[s, m, n])),
                    ]
                )
    return buf.getvalue()


def cost_summary_csv(sched: ScheduleSolution) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["quantity", "scenario", "value"])
    for s in range(sched.n_scenarios):
        writer.writerow(["probability", s, repr(float(sched.probabilities[s]))])
        writer.writerow(["energy_cost", s, repr(float(sched.energy_cost[s]))])
        writer.writerow(["penalty_cost", s, repr(float(sched.penalty_cost[s]))])
    writer.writerow(["revenue", "", repr(float(sched.revenue))])
    writer.writerow(["expected_cost", "", repr(float(sched.expected_cost))])
    if sched.comfort_violation:
        writer.writerow(["comfort_violation_ch", "", repr(float(sched.comfort_violation))])
        writer.writerow(["slack_charge", "", repr(float(sched.slack_charge))])
    return buf.getvalue()
