"""Conditional day-profile sampling and K-means scenario reduction.

A pool of 24-hour actual-temperature profiles is drawn from the fitted
copula conditioned on the day's forecast, then reduced to K probability
weighted scenarios with Lloyd's algorithm.  K is either fixed or chosen by
the elbow rule (largest second difference of the mean-distance curve).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .copulas import FittedCopula, conditional_quantile
from .errors import EmptyCluster, KTooLarge, RangeTooNarrow
from .special import norm_cdf
from .weather import DayForecast

N_HOURS = 24
DEFAULT_AR_COEFFICIENT = 0.9
DEFAULT_RESTARTS = 10
MAX_LLOYD_ITERATIONS = 300


@dataclass(frozen=True, eq=False)
class SamplePool:
    """n_samples x 24 matrix of sampled actual-temperature day profiles."""

    profiles: np.ndarray
    rng_seed: int


@dataclass(frozen=True, eq=False)
class ScenarioSet:
    """K day profiles with probabilities summing to one."""

    profiles: np.ndarray
    probabilities: np.ndarray

    def __post_init__(self):
        if self.profiles.ndim != 2 or self.profiles.shape[1] != N_HOURS:
            raise ValueError(f"profiles must be K x {N_HOURS}")
        if self.probabilities.shape != (self.profiles.shape[0],):
            raise ValueError("one probability per profile required")
        if np.any(self.probabilities <= 0.0):
            raise ValueError("every scenario probability must be positive")
        if abs(float(self.probabilities.sum()) - 1.0) > 1e-12:
            raise ValueError("probabilities must sum to 1 within 1e-12")

    @property
    def n_scenarios(self) -> int:
        return self.profiles.shape[0]


def singleton_scenario_set(profile) -> ScenarioSet:
    profile = np.asarray(profile, dtype=float).reshape(1, -1)
    return ScenarioSet(profile, np.array([1.0]))


def sample_profiles(
    model,
    forecast: DayForecast,
    n_samples: int,
    ar_coefficient: float = DEFAULT_AR_COEFFICIENT,
    seed: int = 0,
) -> SamplePool:
    """Draw day profiles from the conditional copula.

    The 24 uniform draws of each sample follow a Gaussian AR(1) path mapped
    through the normal CDF; ``ar_coefficient`` = 0 gives independent hourly
    draws.  ``model`` may also be a sequence of 24 hour-specific models.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    if not 0.0 <= ar_coefficient < 1.0:
        raise ValueError("ar_coefficient must lie in [0, 1)")
    if isinstance(model, FittedCopula):
        models = [model] * N_HOURS
    else:
        models = list(model)
        if len(models) != N_HOURS:
            raise ValueError(f"need one model or {N_HOURS} hourly models")

    rng = np.random.default_rng(seed)
    z = np.empty((n_samples, N_HOURS))
    z[:, 0] = rng.standard_normal(n_samples)
    innov_scale = np.sqrt(1.0 - ar_coefficient**2)
    for h in range(1, N_HOURS):
        z[:, h] = ar_coefficient * z[:, h - 1] + innov_scale * rng.standard_normal(n_samples)
    w = norm_cdf(z)
    # Guard machine extremes so draws stay strictly interior.
    w = np.clip(w, 1e-12, 1.0 - 1e-12)

    profiles = np.empty((n_samples, N_HOURS))
    for h in range(N_HOURS):
        mdl = models[h]
        u = float(mdl.marginal_forecast.cdf(forecast.temps_c[h]))
        v = conditional_quantile(mdl, w[:, h], u)
        profiles[:, h] = mdl.marginal_actual.inverse(v)
    return SamplePool(profiles=profiles, rng_seed=seed)


# --------------------------------------------------------------------------
# K-means (Lloyd) with restarts
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class KMeansResult:
    centroids: np.ndarray
    assignment: np.ndarray
    mean_distance: float
    n_iterations: int
    # Mean squared distance after each assignment step; this is the quantity
    # Lloyd's two steps provably never increase.
    objective_curve: tuple[float, ...] = field(default=())


def _assign(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    # Squared Euclidean distances; argmin breaks ties at the lowest index.
    d2 = ((points[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    return np.argmin(d2, axis=1)


def within_cluster_mean_distance(points, centroids, assignment) -> float:
    """Average Euclidean distance from each point to its assigned centroid."""
    points = np.asarray(points, dtype=float)
    centroids = np.asarray(centroids, dtype=float)
    diffs = points - centroids[np.asarray(assignment)]
    return float(np.sqrt((diffs**2).sum(axis=1)).mean())


def _mean_squared_distance(points, centroids, assignment) -> float:
    diffs = points - centroids[assignment]
    return float((diffs**2).sum(axis=1).mean())


def _lloyd(points: np.ndarray, init: np.ndarray):
    centroids = init.copy()
    k = centroids.shape[0]
    prev = None
    curve = []
    n_iter = 0
    converged = False
    for n_iter in range(1, MAX_LLOYD_ITERATIONS + 1):
        assignment = _assign(points, centroids)
        curve.append(_mean_squared_distance(points, centroids, assignment))
        if prev is not None and np.array_equal(assignment, prev):
            converged = True
            break
        counts = np.bincount(assignment, minlength=k)
        for i in range(k):
            if counts[i] > 0:
                centroids[i] = points[assignment == i].mean(axis=0)
        empties = np.flatnonzero(counts == 0)
        if empties.size:
            # Reseed empty clusters to the points currently farthest from
            # their centroids (distinct points, farthest first); they carry
            # no members, so the next assignment cannot raise the objective.
            dists = ((points - centroids[assignment]) ** 2).sum(axis=1)
            order = np.argsort(dists)[::-1]
            for j, i in enumerate(empties):
                centroids[i] = points[order[j]]
        prev = assignment
    if not converged:
        assignment = _assign(points, centroids)
    return centroids, assignment, n_iter, curve


def kmeans(
    points,
    k: int,
    seed: int = 0,
    n_restarts: int = DEFAULT_RESTARTS,
) -> KMeansResult:
    """Lloyd's algorithm, best of ``n_restarts`` random initializations.

    Restarts are compared by within-cluster mean Euclidean distance, the
    metric also reported for the elbow curve.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 2:
        raise ValueError("points must be an n x d matrix")
    n = points.shape[0]
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > n:
        raise KTooLarge(f"k={k} exceeds the number of points ({n})")
    if n_restarts < 1:
        raise ValueError("n_restarts must be >= 1")

    rng = np.random.default_rng(seed)
    best: KMeansResult | None = None
    for _ in range(n_restarts):
        init_idx = rng.choice(n, size=k, replace=False)
        centroids, assignment, n_iter, curve = _lloyd(points, points[init_idx])
        md = within_cluster_mean_distance(points, centroids, assignment)
        if best is None or md < best.mean_distance:
            best = KMeansResult(
                centroids=centroids,
                assignment=assignment,
                mean_distance=md,
                n_iterations=n_iter,
                objective_curve=tuple(curve),
            )
    return best


@dataclass(frozen=True, eq=False)
class ElbowResult:
    k_star: int
    ks: tuple[int, ...]
    mean_distances: tuple[float, ...]


def elbow_select(
    points,
    k_range,
    seed: int = 0,
    n_restarts: int = DEFAULT_RESTARTS,
) -> ElbowResult:
    """Pick K at the sharpest change-rate shift of the mean-distance curve.

    Runs kmeans for every K in the inclusive range and returns the interior K
    maximizing the second difference curve[K-1] - 2 curve[K] + curve[K+1];
    ties break toward the smallest K.
    """
    points = np.asarray(points, dtype=float)
    k_lo, k_hi = int(k_range[0]), int(k_range[-1])
    if k_lo < 1 or k_hi > points.shape[0]:
        raise KTooLarge(f"K range [{k_lo}, {k_hi}] outside [1, {points.shape[0]}]")
    ks = list(range(k_lo, k_hi + 1))
    if len(ks) < 3:
        raise RangeTooNarrow("elbow selection needs at least 3 K values")

    rng = np.random.default_rng(seed)
    curve = []
    for k in ks:
        sub_seed = int(rng.integers(0, 2**63 - 1))
        curve.append(kmeans(points, k, seed=sub_seed, n_restarts=n_restarts).mean_distance)
    curve_arr = np.array(curve)
    second = curve_arr[:-2] - 2.0 * curve_arr[1:-1] + curve_arr[2:]
    k_star = ks[1 + int(np.argmax(second))]
    return ElbowResult(k_star=k_star, ks=tuple(ks), mean_distances=tuple(curve))


def to_scenario_set(centroids, assignment, equal_probabilities: bool = False) -> ScenarioSet:
    """Turn cluster centroids into scenarios weighted by cluster share."""
    centroids = np.asarray(centroids, dtype=float)
    assignment = np.asarray(assignment)
    k = centroids.shape[0]
    counts = np.bincount(assignment, minlength=k)
    if np.any(counts == 0):
        empty = [int(i) for i in np.flatnonzero(counts == 0)]
        raise EmptyCluster(f"clusters {empty} have no members")
    if equal_probabilities:
        probs = np.full(k, 1.0 / k)
    else:
        probs = counts / counts.sum()
    # Renormalize away float dust so the sum-to-one invariant holds exactly.
    probs = probs / probs.sum()
    return ScenarioSet(profiles=centroids.copy(), probabilities=probs)


# --------------------------------------------------------------------------
# CSV round-trips
# --------------------------------------------------------------------------

_HOUR_COLS = [f"h{h:02d}" for h in range(N_HOURS)]


def scenario_set_to_csv(scen: ScenarioSet) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["scenario", "probability"] + _HOUR_COLS)
    for i in range(scen.n_scenarios):
        writer.writerow(
            [i, repr(float(scen.probabilities[i]))]
            + [repr(float(x)) for x in scen.profiles[i]]
        )
    return buf.getvalue()


def scenario_set_from_csv(text: str) -> ScenarioSet:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if header[:2] != ["scenario", "probability"] or header[2:] != _HOUR_COLS:
        raise ValueError("not a scenario-set CSV")
    probs, rows = [], []
    for row in reader:
        if not row:
            continue
        probs.append(float(row[1]))
        rows.append([float(x) for x in row[2:]])
    return ScenarioSet(np.array(rows), np.array(probs))


def sample_pool_to_csv(pool: SamplePool) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["sample"] + _HOUR_COLS)
    for i in range(pool.profiles.shape[0]):
        writer.writerow([i] + [repr(float(x)) for x in pool.profiles[i]])
    return buf.getvalue()


def elbow_to_csv(elbow: ElbowResult) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["K", "mean_distance"])
    for k, md in zip(elbow.ks, elbow.mean_distances):
        writer.writerow([k, repr(float(md))])
    return buf.getvalue()
