"""Two-phase revised simplex for general continuous linear programs.

Minimizes c'x subject to sparse rows a'x {<=, =, >=} b and per-variable
bounds (infinities allowed).  Rows get slack columns; rows whose slack cannot
absorb the initial residual get a phase-one artificial.  The basis is held as
a sparse LU factorization refreshed every REFACTOR_INTERVAL pivots, with
product-form eta updates in between.  Pricing is Dantzig (most violating
reduced cost) with Bland's rule engaged after 1000 degenerate pivots.

Free variables rest at zero while nonbasic and move in either direction;
bounded variables rest at a bound and may flip to the opposite bound without
a basis change.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu

from .errors import NumericInstability

DEFAULT_FEAS_TOL = 1e-7
DEFAULT_OPT_TOL = 1e-9
PIVOT_TOL = 1e-9
DEGENERATE_STEP = 1e-10
BLAND_TRIGGER = 1000
REFACTOR_INTERVAL = 100
MAX_ITERATIONS = 500_000

LESS, EQUAL, GREATER = "<=", "=", ">="
_RELATIONS = (LESS, EQUAL, GREATER)


class LpStatus(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True, eq=False)
class LpSolution:
    status: LpStatus
    values: np.ndarray | None
    objective_value: float | None
    iterations: int = 0
    # Rows whose phase-one artificial stayed positive (evidence of conflict).
    infeasible_rows: tuple[int, ...] = field(default=())


class LinearProgram:
    """Mutable LP container: objective, sparse rows, bounds, optional names."""

    def __init__(self, n_vars: int, names=None):
        if n_vars < 1:
            raise ValueError("need at least one variable")
        self.n_vars = n_vars
        self.objective = np.zeros(n_vars)
        self.lower = np.zeros(n_vars)
        self.upper = np.full(n_vars, np.inf)
        self.names = list(names) if names is not None else None
        if self.names is not None and len(self.names) != n_vars:
            raise ValueError("one name per variable required")
        self.rows: list[tuple[np.ndarray, np.ndarray, str, float, str | None]] = []

    def set_bounds(self, index: int, lower: float, upper: float) -> None:
        if lower > upper:
            raise ValueError(f"variable {index}: lower {lower} > upper {upper}")
        self.lower[index] = lower
        self.upper[index] = upper

    def add_constraint(self, indices, coeffs, relation: str, rhs: float, name=None) -> None:
        if relation not in _RELATIONS:
            raise ValueError(f"relation must be one of {_RELATIONS}")
        idx = np.asarray(indices, dtype=np.int64)
        val = np.asarray(coeffs, dtype=float)
        if idx.shape != val.shape or idx.ndim != 1:
            raise ValueError("indices and coeffs must be matching 1-d sequences")
        if idx.size and (idx.min() < 0 or idx.max() >= self.n_vars):
            raise ValueError("constraint references an undeclared variable")
        if idx.size != np.unique(idx).size:
            raise ValueError("duplicate variable in constraint row")
        self.rows.append((idx, val, relation, float(rhs), name))

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    def row_name(self, i: int) -> str:
        name = self.rows[i][4]
        return name if name is not None else f"row{i}"

    def validate(self) -> None:
        if np.any(self.lower > self.upper):
            bad = int(np.argmax(self.lower > self.upper))
            raise ValueError(f"variable {bad}: lower bound exceeds upper bound")
        if not np.all(np.isfinite(self.objective)):
            raise ValueError("objective coefficients must be finite")


# --------------------------------------------------------------------------
# MPS export (fixed format) for cross-checks against external solvers
# --------------------------------------------------------------------------

def to_mps(lp: LinearProgram, problem_name: str = "EBTSLP") -> str:
    def var_name(j):
        if lp.names is not None:
            return lp.names[j][:8]
        return f"X{j + 1:07d}"

    def fmt(value: float) -> str:
        return f"{value:.10g}"

    rel_code = {LESS: "L", EQUAL: "E", GREATER: "G"}
    lines = [f"NAME          {problem_name}"]
    lines.append("ROWS")
    lines.append(" N  COST")
    row_ids = [f"R{i + 1:07d}" for i in range(lp.n_rows)]
    for i, (_, _, rel, _, _) in enumerate(lp.rows):
        lines.append(f" {rel_code[rel]}  {row_ids[i]}")
    lines.append("COLUMNS")
    per_col: list[list[tuple[str, float]]] = [[] for _ in range(lp.n_vars)]
    for i, (idx, val, _, _, _) in enumerate(lp.rows):
        for j, a in zip(idx, val):
            per_col[int(j)].append((row_ids[i], float(a)))
    for j in range(lp.n_vars):
        entries = []
        if lp.objective[j] != 0.0:
            entries.append(("COST", float(lp.objective[j])))
        entries.extend(per_col[j])
        for pos in range(0, len(entries), 2):
            chunk = entries[pos : pos + 2]
            line = f"    {var_name(j):<10}"
            for rname, a in chunk:
                line += f"{rname:<10}{fmt(a):<12}"
            lines.append(line.rstrip())
    lines.append("RHS")
    rhs_entries = [(row_ids[i], r) for i, (_, _, _, r, _) in enumerate(lp.rows) if r != 0.0]
    for pos in range(0, len(rhs_entries), 2):
        chunk = rhs_entries[pos : pos + 2]
        line = f"    {'RHS':<10}"
        for rname, r in chunk:
            line += f"{rname:<10}{fmt(r):<12}"
        lines.append(line.rstrip())
    lines.append("BOUNDS")
    for j in range(lp.n_vars):
        lo, hi = lp.lower[j], lp.upper[j]
        name = var_name(j)
        if lo == hi:
            lines.append(f" FX BND       {name:<10}{fmt(lo)}")
        else:
            if np.isneginf(lo) and np.isposinf(hi):
                lines.append(f" FR BND       {name}")
                continue
            if np.isneginf(lo):
                lines.append(f" MI BND       {name}")
            elif lo != 0.0:
                lines.append(f" LO BND       {name:<10}{fmt(lo)}")
            if not np.isposinf(hi):
                lines.append(f" UP BND       {name:<10}{fmt(hi)}")
    lines.append("ENDATA")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# Solver
# --------------------------------------------------------------------------

_AT_LOWER, _AT_UPPER, _FREE_ZERO, _BASIC = 0, 1, 2, 3


def _solve_unconstrained(lp: LinearProgram) -> LpSolution:
    """An LP with no rows separates per variable; optimum sits on a bound."""
    values = np.where(
        np.isfinite(lp.lower), lp.lower, np.where(np.isfinite(lp.upper), lp.upper, 0.0)
    )
    for j in range(lp.n_vars):
        c = lp.objective[j]
        if c > 0.0:
            if not np.isfinite(lp.lower[j]):
                return LpSolution(LpStatus.UNBOUNDED, None, None)
            values[j] = lp.lower[j]
        elif c < 0.0:
            if not np.isfinite(lp.upper[j]):
                return LpSolution(LpStatus.UNBOUNDED, None, None)
            values[j] = lp.upper[j]
    return LpSolution(LpStatus.OPTIMAL, values, float(lp.objective @ values))


class _Simplex:
    def __init__(self, lp: LinearProgram, feas_tol: float, opt_tol: float):
        self.feas_tol = feas_tol
        self.opt_tol = opt_tol
        m, n = lp.n_rows, lp.n_vars

        lo = list(lp.lower)
        hi = list(lp.upper)
        cols_i: list[np.ndarray] = []
        cols_j: list[np.ndarray] = []
        cols_v: list[np.ndarray] = []
        for i, (idx, val, _, _, _) in enumerate(lp.rows):
            cols_i.append(np.full(idx.size, i, dtype=np.int64))
            cols_j.append(idx)
            cols_v.append(val)
        # One slack per row; equality rows carry a fixed slack.
        for i, (_, _, rel, _, _) in enumerate(lp.rows):
            cols_i.append(np.array([i], dtype=np.int64))
            cols_j.append(np.array([n + i], dtype=np.int64))
            cols_v.append(np.array([1.0]))
            if rel == LESS:
                lo.append(0.0)
                hi.append(np.inf)
            elif rel == GREATER:
                lo.append(-np.inf)
                hi.append(0.0)
            else:
                lo.append(0.0)
                hi.append(0.0)

        self.m = m
        self.n_struct = n
        self.n_real = n + m  # structural + slack
        self.b = np.array([r[3] for r in lp.rows])
        self.lo = np.array(lo)
        self.hi = np.array(hi)

        # Initial resting values: the finite lower bound when present, else
        # the finite upper bound, else zero (free).
        x = np.where(np.isfinite(self.lo), self.lo, np.where(np.isfinite(self.hi), self.hi, 0.0))
        state = np.where(
            np.isfinite(self.lo),
            _AT_LOWER,
            np.where(np.isfinite(self.hi), _AT_UPPER, _FREE_ZERO),
        ).astype(np.int8)

        A_real = sparse.coo_matrix(
            (np.concatenate(cols_v), (np.concatenate(cols_i), np.concatenate(cols_j))),
            shape=(m, self.n_real),
        ).tocsc()

        residual = self.b - A_real @ x
        basis = np.empty(m, dtype=np.int64)
        art_signs: list[float] = []
        art_rows: list[int] = []
        for i in range(m):
            j_slack = n + i
            r = residual[i]
            if self.lo[j_slack] - 1e-12 <= r <= self.hi[j_slack] + 1e-12:
                basis[i] = j_slack
                x[j_slack] = r
                state[j_slack] = _BASIC
            else:
                basis[i] = self.n_real + len(art_rows)
                art_rows.append(i)
                art_signs.append(1.0 if r >= 0.0 else -1.0)
        self.n_art = len(art_rows)
        if self.n_art:
            art = sparse.coo_matrix(
                (
                    np.array(art_signs),
                    (np.array(art_rows, dtype=np.int64), np.arange(self.n_art)),
                ),
                shape=(m, self.n_art),
            ).tocsc()
            self.A = sparse.hstack([A_real, art], format="csc")
            self.lo = np.concatenate([self.lo, np.zeros(self.n_art)])
            self.hi = np.concatenate([self.hi, np.full(self.n_art, np.inf)])
            x = np.concatenate([x, np.abs(residual[np.array(art_rows, dtype=np.int64)])])
            state = np.concatenate([state, np.full(self.n_art, _BASIC, dtype=np.int8)])
        else:
            self.A = A_real
        self.N = self.A.shape[1]
        self.x = x
        self.state = state
        self.basis = basis
        self.art_to_row = {self.n_real + k: row for k, row in enumerate(art_rows)}

        self.c = np.zeros(self.N)  # set per phase
        self.lu = None
        self.etas: list[tuple[int, np.ndarray]] = []
        self.iterations = 0
        self.degenerate_pivots = 0
        self.bland = False
        self._indptr = self.A.indptr
        self._indices = self.A.indices
        self._data = self.A.data
        self._AT = self.A.T.tocsr()

    # --- linear algebra helpers -------------------------------------------

    def _column(self, j: int):
        s, e = self._indptr[j], self._indptr[j + 1]
        return self._indices[s:e], self._data[s:e]

    def refactor(self) -> None:
        B = self.A[:, self.basis].tocsc()
        try:
            self.lu = splu(B, permc_spec="COLAMD")
        except RuntimeError as exc:  # singular basis
            raise NumericInstability(f"basis factorization failed: {exc}") from None
        self.etas = []
        # Recompute basic values from scratch to shed accumulated drift.
        x_nb = self.x.copy()
        x_nb[self.basis] = 0.0
        rhs = self.b - self.A @ x_nb
        self.x[self.basis] = self.lu.solve(rhs)

    def ftran(self, rhs: np.ndarray) -> np.ndarray:
        w = self.lu.solve(rhs)
        for r, d in self.etas:
            wr = w[r]
            if wr != 0.0:
                t = wr / d[r]
                w -= t * d
                w[r] = t
        return w

    def btran(self, vec: np.ndarray) -> np.ndarray:
        v = vec.copy()
        for r, d in reversed(self.etas):
            v[r] = (v[r] - (d @ v - d[r] * v[r])) / d[r]
        return self.lu.solve(v, trans="T")

    # --- simplex core ------------------------------------------------------

    def _price(self):
        y = self.btran(self.c[self.basis])
        d = self.c - self._AT @ y
        movable = self.hi > self.lo
        elig_lo = (self.state == _AT_LOWER) & movable & (d < -self.opt_tol)
        elig_hi = (self.state == _AT_UPPER) & movable & (d > self.opt_tol)
        elig_fr = (self.state == _FREE_ZERO) & (np.abs(d) > self.opt_tol)
        eligible = elig_lo | elig_hi | elig_fr
        if not np.any(eligible):
            return None, 0.0
        idx = np.flatnonzero(eligible)
        if self.bland:
            q = int(idx[0])
        else:
            q = int(idx[np.argmax(np.abs(d[idx]))])
        if self.state[q] == _AT_LOWER:
            sigma = 1.0
        elif self.state[q] == _AT_UPPER:
            sigma = -1.0
        else:
            sigma = -float(np.sign(d[q]))
        return q, sigma

    def _ratio_test(self, q: int, sigma: float):
        rows, vals = self._column(q)
        rhs = np.zeros(self.m)
        rhs[rows] = vals
        w = self.ftran(rhs)

        xb = self.x[self.basis]
        lo_b = self.lo[self.basis]
        hi_b = self.hi[self.basis]
        delta = sigma * w  # basic values move by -delta * t

        dec = delta > PIVOT_TOL
        inc = delta < -PIVOT_TOL
        with np.errstate(divide="ignore", invalid="ignore"):
            t_dec = np.where(dec & np.isfinite(lo_b), (xb - lo_b) / delta, np.inf)
            t_inc = np.where(inc & np.isfinite(hi_b), (hi_b - xb) / (-delta), np.inf)
        t_dec = np.maximum(t_dec, 0.0)
        t_inc = np.maximum(t_inc, 0.0)
        cand = np.minimum(t_dec, t_inc)

        t_best = np.inf
        leave_pos = -1
        leave_to_upper = False
        if cand.size:
            t_min = float(cand.min())
            if np.isfinite(t_min):
                near = np.flatnonzero(cand <= t_min + 1e-12 + 1e-9 * t_min)
                if self.bland:
                    pos = int(near[np.argmin(self.basis[near])])
                else:
                    pos = int(near[np.argmax(np.abs(delta[near]))])
                t_best = float(cand[pos])
                leave_pos = pos
                leave_to_upper = bool(t_inc[pos] <= t_dec[pos])

        span = self.hi[q] - self.lo[q]
        if span < t_best:
            return float(span), -1, False, w
        return t_best, leave_pos, leave_to_upper, w

    def _apply_step(self, q, sigma, t, leave_pos, leave_to_upper, w):
        if t != 0.0:
            self.x[self.basis] -= (sigma * t) * w
            self.x[q] += sigma * t
        if leave_pos < 0:
            # Bound flip: q jumps to its opposite bound, basis unchanged.
            self.state[q] = _AT_UPPER if self.state[q] == _AT_LOWER else _AT_LOWER
            self.x[q] = self.hi[q] if self.state[q] == _AT_UPPER else self.lo[q]
            return
        if abs(w[leave_pos]) < PIVOT_TOL:
            raise NumericInstability(
                f"pivot magnitude {abs(w[leave_pos]):.2e} below {PIVOT_TOL:g}"
            )
        leaving = int(self.basis[leave_pos])
        self.basis[leave_pos] = q
        self.state[q] = _BASIC
        if leave_to_upper:
            self.state[leaving] = _AT_UPPER
            self.x[leaving] = self.hi[leaving]
        elif np.isfinite(self.lo[leaving]):
            self.state[leaving] = _AT_LOWER
            self.x[leaving] = self.lo[leaving]
        else:
            self.state[leaving] = _FREE_ZERO
            self.x[leaving] = 0.0
        self.etas.append((leave_pos, w.copy()))
        if t <= DEGENERATE_STEP:
            self.degenerate_pivots += 1
            if self.degenerate_pivots >= BLAND_TRIGGER:
                self.bland = True
        if len(self.etas) >= REFACTOR_INTERVAL:
            self.refactor()

    def run_phase(self, allow_unbounded: bool):
        """Iterate the current objective to optimality.

        Returns LpStatus.UNBOUNDED when an improving ray exists (phase two
        only), else None once no eligible entering column remains under a
        fresh factorization.
        """
        self.refactor()
        while True:
            q, sigma = self._price()
            if q is None:
                if self.etas:
                    self.refactor()
                    q, sigma = self._price()
                if q is None:
                    return None
            self.iterations += 1
            if self.iterations > MAX_ITERATIONS:
                raise NumericInstability(f"iteration limit {MAX_ITERATIONS} exceeded")
            t, leave_pos, leave_to_upper, w = self._ratio_test(q, sigma)
            if not np.isfinite(t):
                if allow_unbounded:
                    return LpStatus.UNBOUNDED
                raise NumericInstability("phase one cannot be unbounded")
            self._apply_step(q, sigma, t, leave_pos, leave_to_upper, w)

    def drive_out_artificials(self) -> None:
        for pos in range(self.m):
            j = int(self.basis[pos])
            if j < self.n_real:
                continue
            # Basic artificial at zero: swap in any real column with a
            # usable pivot element in this row, if one exists.
            e = np.zeros(self.m)
            e[pos] = 1.0
            y = self.btran(e)
            row = self._AT @ y
            candidates = np.flatnonzero(
                (np.abs(row) > 1e-7)
                & (self.state != _BASIC)
                & (np.arange(self.N) < self.n_real)
            )
            if candidates.size:
                q = int(candidates[0])
                self.basis[pos] = q
                self.state[q] = _BASIC
                self.state[j] = _AT_LOWER
                self.x[j] = 0.0
                self.refactor()
            # Otherwise the row is redundant; the artificial stays basic at 0.

    def solve(self, objective: np.ndarray):
        # Phase one: minimize total artificial infeasibility.
        if self.n_art:
            self.c = np.zeros(self.N)
            self.c[self.n_real :] = 1.0
            self.run_phase(allow_unbounded=False)
            p1 = float(self.c @ self.x)
            scale = max(1.0, float(np.abs(self.b).max(initial=0.0)))
            if p1 > self.feas_tol * scale * max(1.0, np.sqrt(self.m)):
                rows = tuple(
                    self.art_to_row[int(self.basis[i])]
                    for i in range(self.m)
                    if int(self.basis[i]) >= self.n_real
                    and self.x[int(self.basis[i])] > self.feas_tol * scale
                )
                return LpStatus.INFEASIBLE, rows
            self.drive_out_artificials()
            # Pin every artificial at zero for phase two.
            self.lo[self.n_real :] = 0.0
            self.hi[self.n_real :] = 0.0

        self.c = np.zeros(self.N)
        self.c[: objective.size] = objective
        status = self.run_phase(allow_unbounded=True)
        if status is LpStatus.UNBOUNDED:
            return LpStatus.UNBOUNDED, ()
        return LpStatus.OPTIMAL, ()

    def check_feasibility(self) -> float:
        x_real = self.x[: self.n_real]
        resid = self.A[:, : self.n_real] @ x_real - self.b
        bound_lo = np.maximum(self.lo[: self.n_real] - x_real, 0.0)
        bound_hi = np.maximum(x_real - self.hi[: self.n_real], 0.0)
        return max(
            float(np.abs(resid).max(initial=0.0)),
            float(bound_lo.max(initial=0.0)),
            float(bound_hi.max(initial=0.0)),
        )


def solve(
    lp: LinearProgram,
    feas_tol: float = DEFAULT_FEAS_TOL,
    opt_tol: float = DEFAULT_OPT_TOL,
) -> LpSolution:
    """Solve to proven optimality; statuses are Optimal/Infeasible/Unbounded."""
    lp.validate()
    if lp.n_rows == 0:
        return _solve_unconstrained(lp)
    engine = _Simplex(lp, feas_tol, opt_tol)
    status, bad_rows = engine.solve(lp.objective)
    if status is LpStatus.INFEASIBLE:
        return LpSolution(
            status=status,
            values=None,
            objective_value=None,
            iterations=engine.iterations,
            infeasible_rows=bad_rows,
        )
    if status is LpStatus.UNBOUNDED:
        return LpSolution(
            status=status, values=None, objective_value=None, iterations=engine.iterations
        )
    worst = engine.check_feasibility()
    scale = max(1.0, float(np.abs(engine.b).max(initial=0.0)))
    if worst > feas_tol * scale:
        raise NumericInstability(
            f"optimal basis violates feasibility by {worst:.2e} (tol {feas_tol:g})"
        )
    values = engine.x[: lp.n_vars].copy()
    return LpSolution(
        status=LpStatus.OPTIMAL,
        values=values,
        objective_value=float(lp.objective @ values),
        iterations=engine.iterations,
    )
