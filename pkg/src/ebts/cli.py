"""Command-line pipeline: ``fit-copula``, ``schedule``, and ``evaluate``.

Exit codes: 0 success, 1 usage, 2 data error, 3 numeric failure, 4 scheduling
LP infeasible.  Every invocation that reaches its output directory writes a
``run_manifest.json`` beside the outputs, including on failure.

All randomness flows from ``--seed``: each stage derives its own seed as the
first 8 bytes of sha256("<stage-name>:<root-seed>"), so reruns with the same
inputs and seed are byte-identical (the manifest, which records wall-clock
duration, is the one exception).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from datetime import date, datetime
from pathlib import Path

import numpy as np

from . import __version__
from .config import CaseConfig, load_case_config
from .copulas import (
    fit_from_series,
    load_copula,
    save_copula,
)
from .errors import DataError, EbtsError, NumericError, SolverInfeasible
from .evaluation import (
    comparison_to_csv,
    comparison_to_long_csv,
    compare_methods,
    generate_scenarios,
    plan_deterministic,
    plan_stochastic,
    read_test_days_csv,
)
from .model import building_temps_to_csv, cost_summary_csv, schedule_to_csv
from .scenarios import (
    elbow_to_csv,
    sample_pool_to_csv,
    scenario_set_to_csv,
    singleton_scenario_set,
)
from .weather import (
    heating_window_subset,
    parse_temperature_csv,
    read_day_forecast_csv,
    resample_hourly,
    split_heating_seasons,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3
EXIT_INFEASIBLE = 4


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # map argparse usage errors to exit code 1
        raise _UsageError(message)


def derive_seed(root_seed: int, stage: str) -> int:
    digest = hashlib.sha256(f"{stage}:{root_seed}".encode()).digest()
    return int.from_bytes(digest[:8], "little") % (2**63 - 1)


def _prepare_outdir(path: str, force: bool) -> Path:
    out = Path(path)
    if out.exists() and any(out.iterdir()) and not force:
        raise _UsageError(
            f"output directory {out} is not empty; pass --force to overwrite"
        )
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write(out: Path, name: str, text: str) -> Path:
    target = out / name
    target.write_text(text, encoding="utf-8")
    return target


def _write_manifest(out: Path, command: str, args: argparse.Namespace,
                    inputs: list[str], outputs: list[str], seed, t0: float) -> None:
    manifest = {
        "command": command,
        "config": getattr(args, "config", None),
        "inputs": inputs,
        "outputs": sorted(outputs),
        "seed": seed,
        "tool_version": __version__,
        "duration_s": round(time.perf_counter() - t0, 6),
    }
    (out / "run_manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


# --------------------------------------------------------------------------
# fit-copula
# --------------------------------------------------------------------------

def cmd_fit(args) -> int:
    t0 = time.perf_counter()
    out = _prepare_outdir(args.out, args.force)
    outputs: list[str] = []
    try:
        try:
            with open(args.data, "r", encoding="utf-8") as fh:
                records = parse_temperature_csv(fh)
        except FileNotFoundError:
            raise DataError(f"temperature CSV not found: {args.data}") from None
        series = resample_hourly(records, max_gap_h=args.max_gap_h)
        if args.train_end is not None:
            train, _ = split_heating_seasons(series, date.fromisoformat(args.train_end))
        else:
            train = heating_window_subset(series)
            if len(train) == 0:
                raise DataError("no observations inside the heating window")
        model = fit_from_series(train.forecasts(), train.actuals())

        model_path = out / "copula_model.txt"
        save_copula(model, model_path)
        outputs.append(str(model_path))

        lines = ["family,status,bic,log_likelihood,note"]
        for row in model.selection_table:
            lines.append(
                ",".join(
                    [
                        row.family.value,
                        row.status,
                        repr(float(row.bic)) if row.bic is not None else "",
                        repr(float(row.log_likelihood))
                        if row.log_likelihood is not None
                        else "",
                        (row.reason or "").replace(",", ";"),
                    ]
                )
            )
        outputs.append(str(_write(out, "bic_table.csv", "\n".join(lines) + "\n")))
        print(
            f"fitted {model.family.value} copula on {model.n_obs} hourly pairs "
            f"(BIC {model.bic:.1f}); wrote {model_path}"
        )
        return EXIT_OK
    finally:
        _write_manifest(out, "fit-copula", args, [args.data], outputs, args.seed, t0)


# --------------------------------------------------------------------------
# schedule
# --------------------------------------------------------------------------

def cmd_schedule(args) -> int:
    t0 = time.perf_counter()
    out = _prepare_outdir(args.out, args.force)
    outputs: list[str] = []
    try:
        case = load_case_config(args.config)
        try:
            with open(args.forecast, "r", encoding="utf-8") as fh:
                forecast = read_day_forecast_csv(fh)
        except FileNotFoundError:
            raise DataError(f"forecast CSV not found: {args.forecast}") from None

        settings = case.scenario
        if args.samples is not None:
            settings = _replace_settings(settings, n_samples=args.samples)
        if args.k is not None:
            try:
                settings = _replace_settings(
                    settings, k="auto" if args.k == "auto" else int(args.k)
                )
            except ValueError:
                raise _UsageError(f"--k must be an integer or 'auto', got {args.k!r}")
        if args.ar is not None:
            settings = _replace_settings(settings, ar_coefficient=args.ar)

        if not args.deterministic and args.model is None:
            raise _UsageError("--model is required unless --deterministic is set")

        if args.auto_baseline:
            case = _with_auto_baseline(case, forecast)

        if args.deterministic:
            scen = singleton_scenario_set(np.asarray(forecast.temps_c))
            outputs.append(str(_write(out, "scenarios.csv", scenario_set_to_csv(scen))))
            sched = plan_stochastic(case, scen)
        else:
            model = load_copula(args.model)
            scen, pool, elbow = generate_scenarios(
                model, forecast, settings, derive_seed(args.seed, "samples")
            )
            outputs.append(str(_write(out, "samples.csv", sample_pool_to_csv(pool))))
            if elbow is not None:
                outputs.append(str(_write(out, "elbow.csv", elbow_to_csv(elbow))))
            outputs.append(str(_write(out, "scenarios.csv", scenario_set_to_csv(scen))))
            sched = plan_stochastic(case, scen)

        outputs.append(str(_write(out, "schedule.csv", schedule_to_csv(sched))))
        outputs.append(
            str(_write(out, "building_temps.csv", building_temps_to_csv(sched)))
        )
        outputs.append(str(_write(out, "cost_summary.csv", cost_summary_csv(sched))))
        print(
            f"{'deterministic' if args.deterministic else 'stochastic'} plan for "
            f"{forecast.date.isoformat()}: expected cost {sched.expected_cost:.2f} "
            f"({sched.n_scenarios} scenario(s)); outputs in {out}"
        )
        return EXIT_OK
    finally:
        inputs = [args.config, args.forecast] + ([args.model] if args.model else [])
        _write_manifest(out, "schedule", args, inputs, outputs, args.seed, t0)


def _replace_settings(settings, **kw):
    from dataclasses import replace

    return replace(settings, **kw)


def _with_auto_baseline(case: CaseConfig, forecast) -> CaseConfig:
    """Set the baseline to the cost-only optimal consumption for the forecast."""
    from dataclasses import replace

    zero = np.zeros_like(case.market.c_e)
    cost_only = replace(
        case,
        market=type(case.market)(
            c_e=case.market.c_e,
            c_r=zero,
            c_f=zero,
            baseline=case.market.baseline,
            epsilon=case.market.epsilon,
        ),
    )
    sched = plan_deterministic(cost_only, forecast)
    market = type(case.market)(
        c_e=case.market.c_e,
        c_r=case.market.c_r,
        c_f=case.market.c_f,
        baseline=sched.p[0].copy(),
        epsilon=case.market.epsilon,
    )
    return replace(case, market=market)


# --------------------------------------------------------------------------
# evaluate
# --------------------------------------------------------------------------

def cmd_evaluate(args) -> int:
    t0 = time.perf_counter()
    out = _prepare_outdir(args.out, args.force)
    outputs: list[str] = []
    try:
        case = load_case_config(args.config)
        model = load_copula(args.model)
        try:
            with open(args.days, "r", encoding="utf-8") as fh:
                test_days = read_test_days_csv(fh)
        except FileNotFoundError:
            raise DataError(f"test-days CSV not found: {args.days}") from None

        settings = case.scenario
        if args.samples is not None:
            settings = _replace_settings(settings, n_samples=args.samples)
        if args.k is not None:
            settings = _replace_settings(
                settings, k="auto" if args.k == "auto" else int(args.k)
            )

        report = compare_methods(
            model,
            test_days,
            case,
            settings=settings,
            seed=derive_seed(args.seed, "evaluate"),
            threads=args.threads,
        )
        outputs.append(str(_write(out, "comparison.csv", comparison_to_csv(report))))
        outputs.append(
            str(_write(out, "comparison_long.csv", comparison_to_long_csv(report)))
        )
        print(
            f"{len(report.days)} test day(s): mean realized cost "
            f"stochastic {report.mean_stochastic:.2f} vs deterministic "
            f"{report.mean_deterministic:.2f}"
        )
        print(
            f"planning+scoring runtime: stochastic {report.stochastic_seconds:.2f} s, "
            f"deterministic {report.deterministic_seconds:.2f} s"
        )
        return EXIT_OK
    finally:
        _write_manifest(
            out, "evaluate", args, [args.config, args.model, args.days], outputs,
            args.seed, t0,
        )


# --------------------------------------------------------------------------
# argument wiring
# --------------------------------------------------------------------------

def build_parser() -> _Parser:
    parser = _Parser(
        prog="ebts",
        description="Day-ahead boiler-with-storage scheduling under temperature uncertainty",
    )
    parser.add_argument("--version", action="version", version=f"ebts {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit-copula", help="fit marginals and select a copula family")
    p_fit.add_argument("--data", required=True, help="temperature CSV (timestamp,forecast_c,actual_c)")
    p_fit.add_argument("--out", required=True, help="output directory")
    p_fit.add_argument("--max-gap-h", type=float, default=6.0,
                       help="widest record spacing to interpolate across (hours)")
    p_fit.add_argument("--train-end", default=None,
                       help="ISO date: fit only heating-season data strictly before it")
    p_fit.add_argument("--seed", type=int, default=0)
    p_fit.add_argument("--force", action="store_true", help="overwrite existing outputs")
    p_fit.set_defaults(func=cmd_fit)

    p_sch = sub.add_parser("schedule", help="build and solve a day-ahead schedule")
    p_sch.add_argument("--model", default=None, help="fitted copula model document")
    p_sch.add_argument("--config", required=True, help="case configuration INI")
    p_sch.add_argument("--forecast", required=True, help="day forecast CSV (date,hour,forecast_c)")
    p_sch.add_argument("--out", required=True)
    p_sch.add_argument("--samples", type=int, default=None, help="conditional samples (default 400)")
    p_sch.add_argument("--k", default=None, help="scenario count or 'auto' (elbow)")
    p_sch.add_argument("--ar", type=float, default=None, help="hourly AR coefficient of sampling paths")
    p_sch.add_argument("--seed", type=int, default=0)
    p_sch.add_argument("--deterministic", action="store_true",
                       help="single-scenario plan from the pointwise forecast")
    p_sch.add_argument("--auto-baseline", action="store_true",
                       help="set the baseline to the cost-only optimal consumption")
    p_sch.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    p_sch.add_argument("--force", action="store_true")
    p_sch.set_defaults(func=cmd_schedule)

    p_ev = sub.add_parser("evaluate", help="compare methods over test days")
    p_ev.add_argument("--model", required=True)
    p_ev.add_argument("--config", required=True)
    p_ev.add_argument("--days", required=True, help="test-days CSV (date,hour,forecast_c,actual_c)")
    p_ev.add_argument("--out", required=True)
    p_ev.add_argument("--samples", type=int, default=None)
    p_ev.add_argument("--k", default=None)
    p_ev.add_argument("--seed", type=int, default=0)
    p_ev.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    p_ev.add_argument("--force", action="store_true")
    p_ev.set_defaults(func=cmd_evaluate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SolverInfeasible as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except EbtsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
