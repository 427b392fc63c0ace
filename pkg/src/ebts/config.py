"""Case configuration files: INI sections plant / market / buildings / scenario.

Prices are written in Yuan/kWh and converted to Yuan/MWh (x1000) on load.
Building rows carry their source units (10 GJ/C heat capacity, 10 kW/C
conductance, kg/s mass flow) and are converted to the toolkit's MW/MWh/C
unit system here:

    c_bld  [MWh/C] = capacity * 10 / 3.6
    u      [MW/C]  = conductance * 0.01
    mdot_c [MW/C]  = mass_flow * 4186e-6   (water, 4186 J/(kg C))
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .errors import DataError
from .model import BuildingParams, MarketParams, PlantParams
from .scenarios import N_HOURS

GJ10_PER_C_TO_MWH_PER_C = 10.0 / 3.6
KW10_PER_C_TO_MW_PER_C = 0.01
WATER_SPECIFIC_HEAT_MW_PER_C_PER_KGS = 4186.0e-6
YUAN_PER_KWH_TO_YUAN_PER_MWH = 1000.0

FIXTURE_NAME = "zhangjiakou_case"


@dataclass(frozen=True)
class ScenarioSettings:
    """Scenario-generation knobs carried by the case file."""

    n_samples: int = 400
    k: int | str = "auto"
    k_min: int = 2
    k_max: int = 30
    ar_coefficient: float = 0.9
    n_restarts: int = 10
    equal_probabilities: bool = False

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        if isinstance(self.k, str) and self.k != "auto":
            raise ValueError("k must be an integer or 'auto'")


@dataclass(frozen=True)
class CaseConfig:
    plant: PlantParams
    buildings: tuple[BuildingParams, ...]
    market: MarketParams
    scenario: ScenarioSettings


def _floats(raw: str, expect: int | None = None, what: str = "value list") -> np.ndarray:
    try:
        vals = np.array([float(tok) for tok in raw.split()])
    except ValueError as exc:
        raise DataError(f"{what}: {exc}") from None
    if expect is not None and vals.size != expect:
        raise DataError(f"{what}: expected {expect} values, got {vals.size}")
    return vals


def parse_case_config(text: str) -> CaseConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise DataError(f"config parse error: {exc}") from None

    def need(section: str) -> configparser.SectionProxy:
        if not parser.has_section(section):
            raise DataError(f"config lacks required section [{section}]")
        return parser[section]

    def get(sec, key, cast=float, default=None):
        if key not in sec:
            if default is not None:
                return default
            raise DataError(f"[{sec.name}] lacks required key {key!r}")
        try:
            return cast(sec[key])
        except ValueError as exc:
            raise DataError(f"[{sec.name}] {key}: {exc}") from None

    sp = need("plant")
    plant = PlantParams(
        p_min=get(sp, "p_min_mw"),
        p_max=get(sp, "p_max_mw"),
        eta=get(sp, "eta"),
        h_min=get(sp, "h_min_mwh"),
        h_max=get(sp, "h_max_mwh"),
        p_str_max=get(sp, "p_str_max_mw"),
        p_rls_max=get(sp, "p_rls_max_mw"),
        p_str_min=get(sp, "p_str_min_mw", default=0.0),
        p_rls_min=get(sp, "p_rls_min_mw", default=0.0),
        retention=get(sp, "retention_per_h"),
        h_initial=get(sp, "h_initial_mwh"),
        terminal_rule=get(sp, "terminal_rule", cast=str, default="cyclic").strip(),
    )

    sm = need("market")
    market = MarketParams(
        c_e=_floats(sm["energy_price_yuan_per_kwh"], N_HOURS, "energy price")
        * YUAN_PER_KWH_TO_YUAN_PER_MWH,
        c_r=_floats(sm["reserve_price_yuan_per_kwh"], N_HOURS, "reserve price")
        * YUAN_PER_KWH_TO_YUAN_PER_MWH,
        c_f=_floats(sm["penalty_price_yuan_per_kwh"], N_HOURS, "penalty price")
        * YUAN_PER_KWH_TO_YUAN_PER_MWH,
        baseline=_floats(sm["baseline_mw"], N_HOURS, "baseline"),
        epsilon=get(sm, "deadband_mw"),
    )

    sb = need("buildings")
    shared = dict(
        t_bld_initial=get(sb, "t_bld_initial_c"),
        t_bld_min=get(sb, "t_bld_min_c"),
        t_bld_max=get(sb, "t_bld_max_c"),
        t_in_min=get(sb, "t_in_min_c"),
        t_in_max=get(sb, "t_in_max_c"),
        t_out_min=get(sb, "t_out_min_c"),
        t_out_max=get(sb, "t_out_max_c"),
    )
    if "rows" not in sb:
        raise DataError("[buildings] lacks required key 'rows'")
    buildings = []
    for line in sb["rows"].splitlines():
        line = line.strip()
        if not line:
            continue
        tokens = line.split()
        if len(tokens) != 5:
            raise DataError(f"building row needs 5 fields, got {len(tokens)}: {line!r}")
        try:
            idx = int(tokens[0])
            capacity, conductance, flow, theta = (float(t) for t in tokens[1:])
        except ValueError as exc:
            raise DataError(f"building row {line!r}: {exc}") from None
        buildings.append(
            BuildingParams(
                c_bld=capacity * GJ10_PER_C_TO_MWH_PER_C,
                u=conductance * KW10_PER_C_TO_MW_PER_C,
                mdot_c=flow * WATER_SPECIFIC_HEAT_MW_PER_C_PER_KGS,
                theta=theta,
                name=f"building{idx}",
                **shared,
            )
        )
    if not buildings:
        raise DataError("[buildings] rows is empty")

    ss = parser["scenario"] if parser.has_section("scenario") else {}

    def sget(key, cast, default):
        if key not in ss:
            return default
        raw = ss[key].strip()
        return cast(raw)

    k_raw = sget("k", str, "auto")
    scenario = ScenarioSettings(
        n_samples=sget("n_samples", int, 400),
        k="auto" if k_raw == "auto" else int(k_raw),
        k_min=sget("k_min", int, 2),
        k_max=sget("k_max", int, 30),
        ar_coefficient=sget("ar_coefficient", float, 0.9),
        n_restarts=sget("n_restarts", int, 10),
        equal_probabilities=sget(
            "equal_probabilities", lambda s: s.lower() in ("1", "true", "yes"), False
        ),
    )

    return CaseConfig(
        plant=plant, buildings=tuple(buildings), market=market, scenario=scenario
    )


def load_case_config(path) -> CaseConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_case_config(fh.read())
    except FileNotFoundError:
        raise DataError(f"config file not found: {path}") from None


def default_case() -> CaseConfig:
    """The bundled Zhangjiakou heating-station case."""
    text = (
        resources.files("ebts.fixtures").joinpath(f"{FIXTURE_NAME}.ini").read_text("utf-8")
    )
    return parse_case_config(text)


def default_case_text() -> str:
    return (
        resources.files("ebts.fixtures").joinpath(f"{FIXTURE_NAME}.ini").read_text("utf-8")
    )
