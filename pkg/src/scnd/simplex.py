"""Bounded-variable revised simplex on sparse rows.

Phase 1 minimizes the total infeasibility of artificial columns attached to
rows whose initial slack value falls outside its bounds; phase 2 reuses the
final phase-1 basis.  The basis is refactorized (sparse LU) every few dozen
pivots, with product-form eta updates in between; eta vectors and ratio
tests run on the nonzero pattern only, which is what makes the big-M-heavy
supply-chain models tractable.  Dantzig pricing with a Bland's-rule
fallback after a degeneracy stall.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

__all__ = ["SolverOptions", "LpResult", "solve_lp", "solve_lp_arrays"]


@dataclass(frozen=True)
class SolverOptions:
    """Shared LP/MIP solver knobs; every default is pinned for reproducibility."""

    tol_feas: float = 1e-7
    tol_int: float = 1e-6
    tol_opt: float = 1e-9
    iteration_limit: int = 500_000
    node_limit: int | None = None
    time_limit: float | None = None
    gap_limit: float = 0.0
    branching: str = "most-fractional"  # or "pseudo-cost"
    seed: int = 0
    dive_rounding: bool = True
    refactor_every: int = 100

    def __post_init__(self):
        if min(self.tol_feas, self.tol_int, self.tol_opt) <= 0:
            raise ValueError("tolerances must be positive")
        if self.branching not in ("most-fractional", "pseudo-cost"):
            raise ValueError(f"unknown branching rule {self.branching!r}")

    def replace(self, **kw) -> "SolverOptions":
        return dataclasses.replace(self, **kw)


@dataclass
class LpResult:
    status: str  # optimal | infeasible | unbounded | iteration-limit
    objective: float
    primal: np.ndarray | None
    dual: np.ndarray | None
    reduced_costs: np.ndarray | None
    dual_objective: float
    iterations: int


class _Basis:
    """LU factors of the basis plus the eta file accumulated since refactor."""

    def __init__(self, a_csc: sp.csc_matrix):
        self.a_csc = a_csc
        self.m = a_csc.shape[0]
        self.lu = None
        # each eta: (pivot_pos, nonzero_idx, nonzero_vals, pivot_val)
        self.etas: list[tuple[int, np.ndarray, np.ndarray, float]] = []

    def refactor(self, basis: np.ndarray) -> bool:
        try:
            self.lu = splu(
                self.a_csc[:, basis].tocsc(),
                permc_spec="COLAMD",
                diag_pivot_thresh=0.1,
                options={"SymmetricMode": False},
            )
        except RuntimeError:
            return False
        self.etas = []
        return True

    def ftran(self, v: np.ndarray) -> np.ndarray:
        z = self.lu.solve(v)
        for r, idx, vals, wr in self.etas:
            t = z[r] / wr
            if t != 0.0:
                z[idx] -= vals * t
            z[r] = t
        return z

    def btran(self, c: np.ndarray) -> np.ndarray:
        z = c.copy()
        for r, idx, vals, wr in reversed(self.etas):
            zr = z[r]
            z[r] = (zr - (vals @ z[idx] - wr * zr)) / wr
        return self.lu.solve(z, trans="T")

    def push_eta(self, r: int, w: np.ndarray, nz: np.ndarray):
        self.etas.append((r, nz.copy(), w[nz].copy(), w[r]))


def solve_lp(
    model,
    opts: SolverOptions | None = None,
    lower: np.ndarray | None = None,
    upper: np.ndarray | None = None,
) -> LpResult:
    """LP relaxation of a MilpModel under its combined weighted objective.

    `lower`/`upper` override the model's column bounds (used by the
    branch-and-bound driver for node subproblems).
    """
    opts = opts or SolverOptions()
    vm = model.var_map
    return solve_lp_arrays(
        model.a_matrix,
        model.relations,
        model.rhs,
        model.combined_objective(),
        vm.lower if lower is None else lower,
        vm.upper if upper is None else upper,
        opts,
        const=model.combined_constant(),
    )


def solve_lp_arrays(
    a_csr: sp.csr_matrix,
    relations: np.ndarray,
    rhs: np.ndarray,
    cost: np.ndarray,
    lower: np.ndarray,
    upper: np.ndarray,
    opts: SolverOptions | None = None,
    const: float = 0.0,
) -> LpResult:
    opts = opts or SolverOptions()
    m, n = a_csr.shape
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    cost = np.asarray(cost, dtype=float)
    rhs = np.asarray(rhs, dtype=float)

    if np.any(lower > upper):
        return LpResult("infeasible", np.inf, None, None, None, np.inf, 0)

    # presolve: substitute columns fixed by their bounds
    fixed = np.isfinite(lower) & (lower == upper)
    free_cols = np.flatnonzero(~fixed)
    fixed_cols = np.flatnonzero(fixed)
    b_eff = rhs.astype(float, copy=True)
    if fixed_cols.size:
        b_eff -= a_csr[:, fixed_cols] @ lower[fixed_cols]

    status, x_act, y, d_act, iters = _simplex_core(
        a_csr[:, free_cols].tocsc() if fixed_cols.size else a_csr.tocsc(),
        relations,
        b_eff,
        cost[free_cols],
        lower[free_cols],
        upper[free_cols],
        opts,
    )

    if status in ("infeasible", "iteration-limit") and x_act is None:
        return LpResult(status, np.inf, None, None, None, np.inf, iters)
    if status == "unbounded":
        return LpResult(status, -np.inf, None, None, None, -np.inf, iters)

    x = np.empty(n)
    x[free_cols] = x_act
    if fixed_cols.size:
        x[fixed_cols] = lower[fixed_cols]
    objective = float(cost @ x) + const

    d = cost - (a_csr.T @ y) if y is not None else None
    dual_obj = np.nan
    if status == "optimal" and y is not None:
        # strong-duality value: y'b plus reduced costs of columns held at a bound
        at_bound = np.zeros(n)
        nb_lo = np.isfinite(lower) & (np.abs(x - lower) <= 1e-9 * (1 + np.abs(lower)))
        with np.errstate(invalid="ignore"):
            nb_hi = np.isfinite(upper) & (np.abs(x - upper) <= 1e-9 * (1 + np.abs(upper)))
        at_bound[nb_lo] = lower[nb_lo]
        at_bound[nb_hi & ~nb_lo] = upper[nb_hi & ~nb_lo]
        contrib = np.where(nb_lo | nb_hi, d * at_bound, 0.0)
        dual_obj = float(y @ rhs + contrib.sum()) + const

    return LpResult(status, objective, x, y, d, dual_obj, iters)


def _simplex_core(a_csc, relations, rhs, cost, lower, upper, opts):
    """Returns (status, x, y, reduced_costs, iterations) over the active columns."""
    m, n = a_csc.shape

    # slack bounds by relation: Ax + s = b
    s_lower = np.where(relations == "L", 0.0, np.where(relations == "G", -np.inf, 0.0))
    s_upper = np.where(relations == "G", 0.0, np.where(relations == "L", np.inf, 0.0))

    if n == 0:
        # only slacks: feasibility is a pure range check on b
        ok = (rhs >= s_lower - opts.tol_feas) & (rhs <= s_upper + opts.tol_feas)
        if np.all(ok):
            return "optimal", np.zeros(0), np.zeros(m), np.zeros(0), 0
        return "infeasible", None, None, None, 0
    if m == 0:
        if np.any((cost > 0) & ~np.isfinite(lower)) or np.any((cost < 0) & ~np.isfinite(upper)):
            return "unbounded", None, None, None, 0
        x = np.where(cost > 0, lower, np.where(cost < 0, upper, 0.0))
        x = np.where(np.isfinite(x), x, np.where(np.isfinite(lower), lower, 0.0))
        return "optimal", x, np.zeros(0), cost.copy(), 0

    lo = np.concatenate([lower, s_lower, np.zeros(m)])
    hi = np.concatenate([upper, s_upper, np.zeros(m)])  # artificial bounds opened below
    n_tot = n + 2 * m

    start = np.where(np.isfinite(lower), lower, np.where(np.isfinite(upper), upper, 0.0))
    resid = rhs - a_csc @ start
    slack_val = np.clip(resid, s_lower, s_upper)
    art_val = resid - slack_val
    art_sign = np.where(art_val >= 0, 1.0, -1.0)

    a_full = sp.hstack(
        [a_csc, sp.identity(m, format="csc"), sp.diags(art_sign, format="csc")],
        format="csc",
    )
    at_full = a_full.T.tocsr()

    # nonbasic status masks over all columns (structural, slack, artificial)
    is_lb = np.zeros(n_tot, dtype=bool)
    is_ub = np.zeros(n_tot, dtype=bool)
    is_free = np.zeros(n_tot, dtype=bool)
    is_lb[:n] = np.isfinite(lower)
    is_ub[:n] = ~np.isfinite(lower) & np.isfinite(upper)
    is_free[:n] = ~np.isfinite(lower) & ~np.isfinite(upper)
    is_lb[n + m :] = True  # artificials start nonbasic unless needed

    basis = np.arange(n, n + m)
    xb = resid.copy()
    needs_art = np.abs(art_val) > opts.tol_feas
    for i in np.flatnonzero(needs_art):
        basis[i] = n + m + i
        xb[i] = abs(art_val[i])
        # the displaced slack sits at its clamped bound
        if slack_val[i] <= s_lower[i] + 1e-300:
            is_lb[n + i] = True
        else:
            is_ub[n + i] = True
    art_cols = np.flatnonzero(needs_art) + n + m
    is_lb[art_cols] = False
    hi[art_cols] = np.inf
    # slack values at bounds: 0 for every relation, so no explicit storage needed

    phase1_cost = np.zeros(n_tot)
    phase1_cost[art_cols] = 1.0
    phase2_cost = np.concatenate([cost, np.zeros(2 * m)])

    fac = _Basis(a_full)
    if not fac.refactor(basis):
        return "infeasible", None, None, None, 0

    state = _State(a_full, at_full, rhs, lo, hi, basis, xb, is_lb, is_ub, is_free, fac)

    total_iters = 0
    for phase, c in ((1, phase1_cost), (2, phase2_cost)):
        if phase == 1 and not art_cols.size:
            continue
        status, iters = _optimize(state, c, opts, opts.iteration_limit - total_iters)
        total_iters += iters
        if status == "iteration-limit":
            return "iteration-limit", None, None, None, total_iters
        if phase == 1:
            infeas = float(np.sum(state.xb[np.isin(state.basis, art_cols)]))
            if infeas > opts.tol_feas * max(1.0, float(np.abs(rhs).max(initial=1.0))):
                return "infeasible", None, None, None, total_iters
            hi[art_cols] = 0.0
            state.sync_bounds()
        elif status == "unbounded":
            return "unbounded", None, None, None, total_iters

    # drift-free final point and duals
    state.refresh(force=True)
    x = state.nonbasic_values()
    x[state.basis] = state.xb
    y = state.fac.btran(phase2_cost[state.basis])
    d = phase2_cost - at_full @ y
    return "optimal", x[:n], y, d[:n], total_iters


class _State:
    """Mutable simplex state: basis, basic values, nonbasic status masks."""

    def __init__(self, a_full, at_full, rhs, lo, hi, basis, xb, is_lb, is_ub, is_free, fac):
        self.a_full = a_full
        self.at_full = at_full
        self.rhs = rhs
        self.lo = lo
        self.hi = hi
        self.basis = basis
        self.xb = xb
        self.is_lb = is_lb
        self.is_ub = is_ub
        self.is_free = is_free
        self.fac = fac
        self.lo_b = lo[basis].copy()
        self.hi_b = hi[basis].copy()

    def nonbasic_values(self) -> np.ndarray:
        x = np.where(self.is_lb, self.lo, 0.0)
        x = np.where(self.is_ub, self.hi, x)
        return x

    def refresh(self, force=False) -> bool:
        """Refactorize and recompute basic values from the nonbasic point."""
        if not self.fac.refactor(self.basis):
            return False
        xnb = self.nonbasic_values()
        self.xb = self.fac.lu.solve(self.rhs - self.a_full @ xnb)
        self.sync_bounds()
        return True

    def sync_bounds(self):
        self.lo_b = self.lo[self.basis].copy()
        self.hi_b = self.hi[self.basis].copy()

    def column(self, q: int) -> np.ndarray:
        col = np.zeros(self.a_full.shape[0])
        seg = slice(self.a_full.indptr[q], self.a_full.indptr[q + 1])
        col[self.a_full.indices[seg]] = self.a_full.data[seg]
        return col


def _optimize(state: _State, c, opts, iter_budget):
    """Run pivots until the current objective admits no improving column."""
    tol_d = opts.tol_opt
    tol_piv = 1e-9
    bland = False
    stall = 0
    iters = 0
    cb = c[state.basis]
    obj = float(cb @ state.xb)  # nonbasic contribution constant between pivots
    best_obj = obj

    while True:
        if iters >= iter_budget:
            return "iteration-limit", iters

        if len(state.fac.etas) >= opts.refactor_every:
            if not state.refresh():
                return "iteration-limit", iters
            cb = c[state.basis]
            obj = float(cb @ state.xb) + float(c @ state.nonbasic_values())

        y = state.fac.btran(cb)
        d = c - state.at_full @ y

        eligible = (state.is_lb & (d < -tol_d)) | (state.is_ub & (d > tol_d))
        if state.is_free.any():
            eligible |= state.is_free & (np.abs(d) > tol_d)
        eligible &= state.hi > state.lo  # columns pinned by equal bounds never move
        if not eligible.any():
            return "optimal", iters

        if bland:
            q = int(np.argmax(eligible))
        else:
            score = np.abs(np.where(eligible, d, 0.0))
            q = int(np.argmax(score))
        direction = 1.0 if (d[q] < 0) else -1.0

        w = state.fac.ftran(state.column(q))
        nz = np.flatnonzero(np.abs(w) > tol_piv)
        wn = w[nz]
        step = direction * wn  # basic values at nz move by -step * t

        xb_n = state.xb[nz]
        lo_n = state.lo_b[nz]
        hi_n = state.hi_b[nz]
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(
                step > 0,
                (xb_n - lo_n) / step,
                (hi_n - xb_n) / (-step),
            )
        ratio = np.where(np.isnan(ratio), np.inf, np.maximum(ratio, 0.0))
        t_own = state.hi[q] - state.lo[q]
        t_basic = float(ratio.min(initial=np.inf))
        t_star = min(t_basic, t_own)
        if not np.isfinite(t_star):
            return "unbounded", iters

        iters += 1
        if t_own <= t_basic:
            # bound flip: q runs to its opposite bound, basics adjust
            if t_own != 0.0:
                state.xb[nz] = xb_n - step * t_own
            if state.is_lb[q]:
                state.is_lb[q] = False
                state.is_ub[q] = True
            else:
                state.is_ub[q] = False
                state.is_lb[q] = True
        else:
            tie = ratio <= t_star + 1e-9
            cand = np.flatnonzero(tie)
            if bland:
                rr = int(cand[np.argmin(state.basis[nz[cand]])])
            else:
                rr = int(cand[np.argmax(np.abs(wn[cand]))])
            r = int(nz[rr])
            leaving = int(state.basis[r])
            if t_star != 0.0:
                state.xb[nz] = xb_n - step * t_star
            to_lower = step[rr] > 0
            if to_lower:
                state.is_lb[leaving] = True
            else:
                state.is_ub[leaving] = True
            # entering column becomes basic at its bound value plus the step
            enter_val = (
                state.lo[q] if state.is_lb[q] else state.hi[q] if state.is_ub[q] else 0.0
            ) + direction * t_star
            state.is_lb[q] = False
            state.is_ub[q] = False
            state.is_free[q] = False
            state.basis[r] = q
            state.xb[r] = enter_val
            state.lo_b[r] = state.lo[q]
            state.hi_b[r] = state.hi[q]
            state.fac.push_eta(r, w, nz)

        obj -= abs(d[q]) * t_star
        if obj < best_obj - 1e-12 * (1.0 + abs(best_obj)):
            best_obj = obj
            stall = 0
            bland = False
        else:
            stall += 1
            if stall >= 512:
                bland = True
