"""Bivariate copula fitting, selection, and conditional sampling.

The joint law of (forecast, actual) temperature is split into two empirical
marginals and a parametric copula.  Five candidate families are supported
(Gaussian, Student-t, Gumbel, Clayton, Frank); the dependence parameter comes
from Kendall's tau inversion, Student-t degrees of freedom from a likelihood
grid search, and the winning family is the one with the smallest BIC.

Sampling the actual temperature given a forecast goes through the conditional
copula CDF: u = F_forecast(x), solve dC(u,v)/du = w for v, return
F_actual^{-1}(v).  Randomness enters only through the caller-supplied uniform
draw w, so sampling is deterministic and replayable.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np
from scipy import integrate
from scipy import stats as _stats

from .errors import (
    BoundaryInput,
    DegenerateInput,
    NoFeasibleFamily,
    NumericFailure,
    TauOutOfDomain,
    TooFewSamples,
)
from .special import norm_cdf, norm_ppf, t_cdf, t_pdf, t_ppf

MIN_SAMPLES = 30
STUDENT_T_NU_GRID = (2.5,) + tuple(float(nu) for nu in range(3, 31))
_BISECT_TOL = 1e-10
_FRANK_TOL = 1e-8
_FRANK_THETA_MAX = 500.0


class CopulaFamily(str, Enum):
    GAUSSIAN = "gaussian"
    STUDENT_T = "student_t"
    GUMBEL = "gumbel"
    CLAYTON = "clayton"
    FRANK = "frank"


ALL_FAMILIES = tuple(CopulaFamily)
_ELLIPTICAL = (CopulaFamily.GAUSSIAN, CopulaFamily.STUDENT_T)


# --------------------------------------------------------------------------
# Empirical marginals
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class EmpiricalMarginal:
    """Empirical CDF with i/(n+1) plotting positions and linear interpolation.

    Outside the sample range the CDF clamps to [1/(n+1), n/(n+1)] and the
    inverse clamps to the sample extremes.
    """

    sorted_values: np.ndarray
    plotting_positions: np.ndarray

    def cdf(self, x):
        return np.interp(
            x,
            self.sorted_values,
            self.plotting_positions,
            left=self.plotting_positions[0],
            right=self.plotting_positions[-1],
        )

    def inverse(self, p):
        return np.interp(
            p,
            self.plotting_positions,
            self.sorted_values,
            left=self.sorted_values[0],
            right=self.sorted_values[-1],
        )


def fit_marginal(samples) -> EmpiricalMarginal:
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 1:
        raise ValueError("samples must be one-dimensional")
    if samples.size < MIN_SAMPLES:
        raise TooFewSamples(f"need >= {MIN_SAMPLES} samples, got {samples.size}")
    if not np.all(np.isfinite(samples)):
        raise ValueError("samples must be finite")
    n = samples.size
    return EmpiricalMarginal(
        sorted_values=np.sort(samples),
        plotting_positions=np.arange(1, n + 1, dtype=float) / (n + 1),
    )


def pseudo_observations(x) -> np.ndarray:
    """Map raw samples to (0,1) via average ranks over n+1 (copula fitting domain)."""
    x = np.asarray(x, dtype=float)
    return _stats.rankdata(x, method="average") / (x.size + 1)


def kendall_tau(pairs) -> float:
    """Kendall's rank correlation (tau-b, tie adjusted)."""
    pairs = np.asarray(pairs, dtype=float)
    if pairs.ndim != 2 or pairs.shape[1] != 2:
        raise ValueError("pairs must have shape (n, 2)")
    if pairs.shape[0] < 2:
        raise DegenerateInput("need at least 2 pairs")
    x, y = pairs[:, 0], pairs[:, 1]
    if np.ptp(x) == 0.0 or np.ptp(y) == 0.0:
        raise DegenerateInput("a channel has zero variation; tau is undefined")
    tau = _stats.kendalltau(x, y, variant="b").statistic
    if not np.isfinite(tau):
        raise DegenerateInput("tau undefined for this input")
    return float(tau)


# --------------------------------------------------------------------------
# Fitted model container
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FamilyScore:
    """One row of the per-family selection table."""

    family: CopulaFamily
    status: str                      # "fitted" or "skipped"
    bic: float | None = None
    log_likelihood: float | None = None
    reason: str | None = None


@dataclass(frozen=True, eq=False)
class FittedCopula:
    family: CopulaFamily
    rho: float | None = None
    nu: float | None = None
    theta: float | None = None
    marginal_forecast: EmpiricalMarginal | None = None
    marginal_actual: EmpiricalMarginal | None = None
    log_likelihood: float = float("nan")
    bic: float = float("nan")
    n_params: int = 1
    n_obs: int = 0
    selection_table: tuple[FamilyScore, ...] | None = None

    def __post_init__(self):
        fam = self.family
        if fam in _ELLIPTICAL:
            if self.rho is None or not -1.0 < self.rho < 1.0:
                raise ValueError(f"{fam.value} needs rho in (-1, 1)")
            if self.theta is not None:
                raise ValueError(f"{fam.value} takes no theta")
            if fam is CopulaFamily.STUDENT_T:
                if self.nu is None or self.nu <= 2.0:
                    raise ValueError("student_t needs nu > 2")
            elif self.nu is not None:
                raise ValueError("gaussian takes no nu")
        else:
            if self.rho is not None or self.nu is not None:
                raise ValueError(f"{fam.value} takes only theta")
            if self.theta is None:
                raise ValueError(f"{fam.value} needs theta")
            if fam is CopulaFamily.GUMBEL and self.theta < 1.0:
                raise ValueError("gumbel needs theta >= 1")
            if fam is CopulaFamily.CLAYTON and self.theta <= 0.0:
                raise ValueError("clayton needs theta > 0")
            if fam is CopulaFamily.FRANK and self.theta == 0.0:
                raise ValueError("frank needs theta != 0")
        expected_q = 2 if fam is CopulaFamily.STUDENT_T else 1
        if self.n_params != expected_q:
            raise ValueError(f"{fam.value} has q={expected_q} parameters")

    def with_marginals(
        self, marginal_forecast: EmpiricalMarginal, marginal_actual: EmpiricalMarginal
    ) -> "FittedCopula":
        return replace(
            self, marginal_forecast=marginal_forecast, marginal_actual=marginal_actual
        )


# --------------------------------------------------------------------------
# Tau inversion per family
# --------------------------------------------------------------------------

def _debye1(theta: float) -> float:
    """First Debye function D1(theta) = (1/theta) * int_0^theta t/(e^t - 1) dt."""

    def integrand(t):
        return 1.0 if t == 0.0 else t / np.expm1(t)

    val, _ = integrate.quad(integrand, 0.0, theta, limit=200)
    return val / theta


def frank_tau_from_theta(theta: float) -> float:
    """Kendall's tau of a Frank copula; odd in theta."""
    if theta == 0.0:
        return 0.0
    a = abs(theta)
    tau = 1.0 - 4.0 / a * (1.0 - _debye1(a))
    return tau if theta > 0 else -tau


def _frank_theta_from_tau(tau: float) -> float:
    if abs(tau) < 1e-12:
        raise TauOutOfDomain("frank is undefined at tau = 0 (theta would be 0)")
    target = abs(tau)
    lo, hi = 1e-8, _FRANK_THETA_MAX
    if frank_tau_from_theta(hi) < target:
        raise NumericFailure(f"frank inversion: |tau|={target:g} beyond bracket")
    # Plain bisection on the monotone Debye relation.
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if frank_tau_from_theta(mid) < target:
            lo = mid
        else:
            hi = mid
        if hi - lo < _FRANK_TOL:
            theta = 0.5 * (lo + hi)
            return theta if tau > 0 else -theta
    raise NumericFailure("frank inversion did not converge")


def _params_from_tau(family: CopulaFamily, tau: float) -> dict:
    if family in _ELLIPTICAL:
        return {"rho": float(np.sin(0.5 * np.pi * tau))}
    if family is CopulaFamily.GUMBEL:
        if tau <= 0.0:
            raise TauOutOfDomain(f"gumbel needs tau > 0, got {tau:.4f}")
        return {"theta": 1.0 / (1.0 - tau)}
    if family is CopulaFamily.CLAYTON:
        if tau <= 0.0:
            raise TauOutOfDomain(f"clayton needs tau > 0, got {tau:.4f}")
        return {"theta": 2.0 * tau / (1.0 - tau)}
    if family is CopulaFamily.FRANK:
        return {"theta": _frank_theta_from_tau(tau)}
    raise ValueError(f"unknown family {family}")


# --------------------------------------------------------------------------
# Densities and conditionals
# --------------------------------------------------------------------------

def _check_interior(u, v):
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if np.any(u <= 0.0) or np.any(u >= 1.0) or np.any(v <= 0.0) or np.any(v >= 1.0):
        raise BoundaryInput("(u, v) must lie strictly inside (0, 1)^2")
    return u, v


def _log_density_gaussian(u, v, rho):
    x, y = norm_ppf(u), norm_ppf(v)
    one = 1.0 - rho * rho
    # Bivariate case of |O|^{-1/2} exp(-psi' (O^{-1} - I) psi / 2) with
    # O = [[1, rho], [rho, 1]].
    quad = (rho * rho * (x * x + y * y) - 2.0 * rho * x * y) / one
    return -0.5 * np.log(one) - 0.5 * quad


def _log_density_student_t(u, v, rho, nu):
    x, y = t_ppf(u, nu), t_ppf(v, nu)
    one = 1.0 - rho * rho
    from scipy.special import gammaln

    lognorm = (
        gammaln(0.5 * (nu + 2.0))
        + gammaln(0.5 * nu)
        - 2.0 * gammaln(0.5 * (nu + 1.0))
        - 0.5 * np.log(one)
    )
    q = (x * x - 2.0 * rho * x * y + y * y) / (nu * one)
    return (
        lognorm
        - 0.5 * (nu + 2.0) * np.log1p(q)
        + 0.5 * (nu + 1.0) * (np.log1p(x * x / nu) + np.log1p(y * y / nu))
    )


def _log_density_gumbel(u, v, theta):
    lu, lv = -np.log(u), -np.log(v)
    s = lu**theta + lv**theta
    a = s ** (1.0 / theta)
    return (
        -a
        + (theta - 1.0) * (np.log(lu) + np.log(lv))
        + np.log(a * a + (theta - 1.0) * a)
        - 2.0 * np.log(s)
        - np.log(u)
        - np.log(v)
    )


def _log_density_clayton(u, v, theta):
    return (
        np.log1p(theta)
        - (theta + 1.0) * (np.log(u) + np.log(v))
        - (2.0 + 1.0 / theta) * np.log(u ** (-theta) + v ** (-theta) - 1.0)
    )


def _log_density_frank(u, v, theta):
    # c = theta (1 - e^-theta) e^{-theta(u+v)} / [(1 - e^-theta) - (1 - e^-theta u)(1 - e^-theta v)]^2
    g1 = -np.expm1(-theta)
    gu = -np.expm1(-theta * u)
    gv = -np.expm1(-theta * v)
    denom = g1 - gu * gv
    return np.log(abs(theta)) + np.log(g1 / (denom * denom)) - theta * (u + v)


def copula_density(model: FittedCopula, u, v):
    """Copula density at interior points; scalar or elementwise on arrays."""
    u, v = _check_interior(u, v)
    fam = model.family
    if fam is CopulaFamily.GAUSSIAN:
        logc = _log_density_gaussian(u, v, model.rho)
    elif fam is CopulaFamily.STUDENT_T:
        logc = _log_density_student_t(u, v, model.rho, model.nu)
    elif fam is CopulaFamily.GUMBEL:
        logc = _log_density_gumbel(u, v, model.theta)
    elif fam is CopulaFamily.CLAYTON:
        logc = _log_density_clayton(u, v, model.theta)
    else:
        logc = _log_density_frank(u, v, model.theta)
    out = np.exp(logc)
    return float(out) if np.isscalar(u) or out.ndim == 0 else out


def log_likelihood(model: FittedCopula, pseudo_obs) -> float:
    """Sum of log copula densities over the pseudo-observations."""
    pseudo_obs = np.asarray(pseudo_obs, dtype=float)
    if pseudo_obs.size == 0:
        raise ValueError("pseudo_obs must be nonempty")
    u, v = _check_interior(pseudo_obs[:, 0], pseudo_obs[:, 1])
    fam = model.family
    if fam is CopulaFamily.GAUSSIAN:
        logc = _log_density_gaussian(u, v, model.rho)
    elif fam is CopulaFamily.STUDENT_T:
        logc = _log_density_student_t(u, v, model.rho, model.nu)
    elif fam is CopulaFamily.GUMBEL:
        logc = _log_density_gumbel(u, v, model.theta)
    elif fam is CopulaFamily.CLAYTON:
        logc = _log_density_clayton(u, v, model.theta)
    else:
        logc = _log_density_frank(u, v, model.theta)
    return float(np.sum(logc))


def bic(model: FittedCopula, n_samples: int) -> float:
    """Bayesian information criterion -2 ln L + q ln n."""
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    return float(-2.0 * model.log_likelihood + model.n_params * np.log(n_samples))


def conditional_cdf(model: FittedCopula, v, u):
    """P(V <= v | U = u), the u-partial of the copula CDF."""
    u, v = _check_interior(u, v)
    fam = model.family
    if fam is CopulaFamily.GAUSSIAN:
        rho = model.rho
        out = norm_cdf((norm_ppf(v) - rho * norm_ppf(u)) / np.sqrt(1.0 - rho * rho))
    elif fam is CopulaFamily.STUDENT_T:
        rho, nu = model.rho, model.nu
        x, y = t_ppf(u, nu), t_ppf(v, nu)
        scale = np.sqrt((nu + x * x) * (1.0 - rho * rho) / (nu + 1.0))
        out = t_cdf((y - rho * x) / scale, nu + 1.0)
    elif fam is CopulaFamily.GUMBEL:
        theta = model.theta
        lu, lv = -np.log(u), -np.log(v)
        s = lu**theta + lv**theta
        a = s ** (1.0 / theta)
        out = np.exp(-a + (1.0 / theta - 1.0) * np.log(s) + (theta - 1.0) * np.log(lu)) / u
    elif fam is CopulaFamily.CLAYTON:
        theta = model.theta
        out = u ** (-theta - 1.0) * (u ** (-theta) + v ** (-theta) - 1.0) ** (
            -1.0 - 1.0 / theta
        )
    else:
        theta = model.theta
        eu = np.exp(-theta * u)
        gv = -np.expm1(-theta * v)
        g1 = -np.expm1(-theta)
        gu = -np.expm1(-theta * u)
        out = eu * gv / (g1 - gu * gv)
    out = np.clip(out, 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


def conditional_quantile(model: FittedCopula, w, u):
    """Solve conditional_cdf(v | u) = w for v by bisection to |dv| < 1e-10."""
    w = np.atleast_1d(np.asarray(w, dtype=float))
    u_arr = np.broadcast_to(np.asarray(u, dtype=float), w.shape).copy()
    if np.any((w <= 0.0) | (w >= 1.0)):
        raise BoundaryInput("uniform draws must lie strictly inside (0, 1)")
    if np.any((u_arr <= 0.0) | (u_arr >= 1.0)):
        raise BoundaryInput("conditioning u must lie strictly inside (0, 1)")
    lo = np.zeros_like(w)
    hi = np.ones_like(w)
    # The conditional CDF has limits 0 and 1 at the open endpoints, so (0, 1)
    # always brackets; endpoints are never evaluated.
    n_steps = int(np.ceil(np.log2(1.0 / _BISECT_TOL))) + 1
    for _ in range(n_steps):
        mid = 0.5 * (lo + hi)
        too_low = conditional_cdf(model, mid, u_arr) < w
        lo = np.where(too_low, mid, lo)
        hi = np.where(too_low, hi, mid)
    v = 0.5 * (lo + hi)
    if np.any(hi - lo > 2.0 * _BISECT_TOL):
        raise NumericFailure("conditional quantile bisection failed to bracket")
    return v


def sample_conditional(model: FittedCopula, forecast_c: float, w):
    """Actual-temperature draw(s) given a forecast and uniform draw(s) w."""
    if model.marginal_forecast is None or model.marginal_actual is None:
        raise ValueError("model needs both marginals attached for sampling")
    scalar = np.ndim(w) == 0
    u = float(model.marginal_forecast.cdf(forecast_c))
    v = conditional_quantile(model, w, u)
    out = model.marginal_actual.inverse(v)
    return float(out[0]) if scalar else out


# --------------------------------------------------------------------------
# Fitting and selection
# --------------------------------------------------------------------------

def _validate_pseudo_obs(pseudo_obs) -> np.ndarray:
    pseudo_obs = np.asarray(pseudo_obs, dtype=float)
    if pseudo_obs.ndim != 2 or pseudo_obs.shape[1] != 2:
        raise ValueError("pseudo_obs must have shape (n, 2)")
    if pseudo_obs.shape[0] < MIN_SAMPLES:
        raise TooFewSamples(
            f"need >= {MIN_SAMPLES} pseudo-observations, got {pseudo_obs.shape[0]}"
        )
    if np.any(pseudo_obs <= 0.0) or np.any(pseudo_obs >= 1.0):
        raise BoundaryInput("pseudo-observations must lie strictly inside (0, 1)^2")
    return pseudo_obs


def fit_copula(family: CopulaFamily, pseudo_obs) -> FittedCopula:
    """Fit one family by tau inversion (plus nu grid search for Student-t)."""
    pseudo_obs = _validate_pseudo_obs(pseudo_obs)
    n = pseudo_obs.shape[0]
    tau = kendall_tau(pseudo_obs)
    params = _params_from_tau(family, tau)

    if family is CopulaFamily.STUDENT_T:
        best_nu, best_ll = None, -np.inf
        for nu in STUDENT_T_NU_GRID:
            cand = FittedCopula(family=family, nu=nu, n_params=2, **params)
            ll = log_likelihood(cand, pseudo_obs)
            if ll > best_ll:
                best_nu, best_ll = nu, ll
        model = FittedCopula(family=family, nu=best_nu, n_params=2, **params)
        ll = best_ll
    else:
        model = FittedCopula(family=family, n_params=1, **params)
        ll = log_likelihood(model, pseudo_obs)

    model = replace(model, log_likelihood=ll, n_obs=n)
    return replace(model, bic=bic(model, n))


def select_family(pseudo_obs, families=ALL_FAMILIES) -> FittedCopula:
    """Fit every candidate family and return the smallest-BIC model.

    Families whose tau inversion is out of domain are skipped; the full
    per-family table is attached to the winner for reporting.
    """
    pseudo_obs = _validate_pseudo_obs(pseudo_obs)
    rows: list[FamilyScore] = []
    fitted: dict[CopulaFamily, FittedCopula] = {}
    for family in families:
        try:
            model = fit_copula(family, pseudo_obs)
        except TauOutOfDomain as exc:
            rows.append(FamilyScore(family, "skipped", reason=str(exc)))
            continue
        except NumericFailure as exc:
            rows.append(FamilyScore(family, "skipped", reason=str(exc)))
            continue
        fitted[family] = model
        rows.append(
            FamilyScore(family, "fitted", bic=model.bic, log_likelihood=model.log_likelihood)
        )
    if not fitted:
        raise NoFeasibleFamily("no copula family could be fitted to this data")
    winner = min(fitted.values(), key=lambda mdl: mdl.bic)
    return replace(winner, selection_table=tuple(rows))


def fit_from_series(forecasts, actuals) -> FittedCopula:
    """Full pipeline: marginals + pseudo-observations + family selection."""
    forecasts = np.asarray(forecasts, dtype=float)
    actuals = np.asarray(actuals, dtype=float)
    if forecasts.shape != actuals.shape:
        raise ValueError("forecast and actual series must have equal length")
    marg_f = fit_marginal(forecasts)
    marg_a = fit_marginal(actuals)
    pobs = np.column_stack([pseudo_observations(forecasts), pseudo_observations(actuals)])
    model = select_family(pobs)
    return model.with_marginals(marg_f, marg_a)


# --------------------------------------------------------------------------
# Model document (single text file, key-value)
# --------------------------------------------------------------------------

_MAGIC = "ebts-copula-model v1"


def copula_document(model: FittedCopula) -> str:
    """Serialize a fitted model (with marginals) to the key-value text schema."""
    if model.marginal_forecast is None or model.marginal_actual is None:
        raise ValueError("model must carry both marginals to be serialized")
    lines = [_MAGIC, f"family: {model.family.value}"]
    if model.rho is not None:
        lines.append(f"rho: {float(model.rho)!r}")
    if model.nu is not None:
        lines.append(f"nu: {float(model.nu)!r}")
    if model.theta is not None:
        lines.append(f"theta: {float(model.theta)!r}")
    lines.append(f"log_likelihood: {float(model.log_likelihood)!r}")
    lines.append(f"bic: {float(model.bic)!r}")
    lines.append(f"n_params: {model.n_params}")
    lines.append(f"n_obs: {model.n_obs}")
    for label, marg in (
        ("marginal_forecast", model.marginal_forecast),
        ("marginal_actual", model.marginal_actual),
    ):
        values = " ".join(repr(float(x)) for x in marg.sorted_values)
        lines.append(f"{label}_values: {values}")
    return "\n".join(lines) + "\n"


def parse_copula_document(text: str) -> FittedCopula:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].strip() != _MAGIC:
        raise ValueError(f"not a copula model document (expected {_MAGIC!r} header)")
    fields: dict[str, str] = {}
    for ln in lines[1:]:
        key, _, value = ln.partition(":")
        fields[key.strip()] = value.strip()
    family = CopulaFamily(fields["family"])
    marginals = {}
    for label in ("marginal_forecast", "marginal_actual"):
        values = np.array([float(tok) for tok in fields[f"{label}_values"].split()])
        n = values.size
        marginals[label] = EmpiricalMarginal(
            sorted_values=values,
            plotting_positions=np.arange(1, n + 1, dtype=float) / (n + 1),
        )
    return FittedCopula(
        family=family,
        rho=float(fields["rho"]) if "rho" in fields else None,
        nu=float(fields["nu"]) if "nu" in fields else None,
        theta=float(fields["theta"]) if "theta" in fields else None,
        marginal_forecast=marginals["marginal_forecast"],
        marginal_actual=marginals["marginal_actual"],
        log_likelihood=float(fields["log_likelihood"]),
        bic=float(fields["bic"]),
        n_params=int(fields["n_params"]),
        n_obs=int(fields["n_obs"]),
    )


def save_copula(model: FittedCopula, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(copula_document(model))


def load_copula(path) -> FittedCopula:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_copula_document(fh.read())
