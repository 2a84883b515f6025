"""Best-bound branch-and-bound over the LP relaxation.

Node subproblems change only column bounds, so every node re-solves the LP
from scratch with tightened bounds (no warm starts).  The search dives
depth-first until the first incumbent, then switches to best-bound node
selection.  Branching picks the integer column whose fractional part is
closest to 0.5 (ties: lowest column index); the dive explores the
round-up child first.  Fully deterministic for fixed options.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass, field

import numpy as np

from .simplex import LpResult, SolverOptions, solve_lp

__all__ = ["MipResult", "SolverError", "solve_mip"]


class SolverError(RuntimeError):
    """Numerical failure or an unbounded relaxation; not a normal status."""


@dataclass
class MipResult:
    status: str  # optimal | infeasible | node-limit | time-limit
    incumbent: np.ndarray | None
    objective: float
    bound: float
    nodes: int
    gap: float
    iterations: int = 0


@dataclass
class _Node:
    bound: float  # parent LP value: valid lower bound before solving
    depth: int
    seq: int
    overrides_lo: dict[int, float]
    overrides_hi: dict[int, float]
    branch_col: int = -1
    branch_frac: float = 0.0
    branch_up: bool = False

    def heap_key(self):
        return (self.bound, self.seq)


class _PseudoCosts:
    """Average LP degradation per unit of rounded-away fraction."""

    def __init__(self, n):
        self.sum_up = np.zeros(n)
        self.cnt_up = np.zeros(n)
        self.sum_dn = np.zeros(n)
        self.cnt_dn = np.zeros(n)

    @property
    def observations(self) -> float:
        return float(self.cnt_up.sum() + self.cnt_dn.sum())

    def update(self, col, up, degradation, frac):
        span = (1.0 - frac) if up else frac
        if span <= 1e-9:
            return
        rate = max(degradation, 0.0) / span
        if up:
            self.sum_up[col] += rate
            self.cnt_up[col] += 1
        else:
            self.sum_dn[col] += rate
            self.cnt_dn[col] += 1

    def score(self, cols, fracs):
        def mean(s, c):
            tot, n = s[cols], c[cols]
            seen = n > 0
            have = float(c.sum())
            fallback = (float(s.sum()) / have) if have else 1.0
            return np.where(seen, tot / np.maximum(n, 1.0), fallback)

        up = mean(self.sum_up, self.cnt_up) * (1.0 - fracs)
        dn = mean(self.sum_dn, self.cnt_dn) * fracs
        return np.minimum(up, dn) + 1e-6 * (up + dn)


def solve_mip(model, opts: SolverOptions | None = None) -> MipResult:
    """Branch-and-bound minimization of the model's combined objective."""
    opts = opts or SolverOptions()
    vm = model.var_map
    base_lo = vm.lower.astype(float, copy=True)
    base_hi = vm.upper.astype(float, copy=True)
    int_cols = np.flatnonzero(vm.is_int)
    cobj = model.combined_objective()
    const = model.combined_constant()
    t_start = time.monotonic()
    node_cap = opts.node_limit if opts.node_limit is not None else np.inf
    time_cap = opts.time_limit if opts.time_limit is not None else np.inf

    total_lp_iters = 0
    nodes_solved = 0
    incumbent: np.ndarray | None = None
    inc_obj = np.inf
    pseudo = _PseudoCosts(vm.n_cols)

    def node_bounds(node: _Node):
        lo, hi = base_lo.copy(), base_hi.copy()
        for c, v in node.overrides_lo.items():
            lo[c] = max(lo[c], v)
        for c, v in node.overrides_hi.items():
            hi[c] = min(hi[c], v)
        return lo, hi

    def lp_at(lo, hi) -> LpResult:
        nonlocal total_lp_iters
        res = solve_lp(model, opts, lower=lo, upper=hi)
        total_lp_iters += res.iterations
        return res

    def fix_ints_and_solve(vals, lo, hi):
        lo2, hi2 = lo.copy(), hi.copy()
        lo2[int_cols] = vals
        hi2[int_cols] = vals
        res = lp_at(lo2, hi2)
        if res.status == "optimal":
            x = res.primal.copy()
            x[int_cols] = vals
            return x
        return None

    def accept(x):
        nonlocal incumbent, inc_obj
        obj = float(cobj @ x) + const
        if obj < inc_obj - 1e-15:
            incumbent, inc_obj = x.copy(), obj

    stack: list[_Node] = [_Node(-np.inf, 0, 0, {}, {})]
    heap: list[tuple[tuple[float, int], _Node]] = []
    seq = 1
    status = None

    def open_bound():
        vals = []
        if stack:
            vals.append(min(n_.bound for n_ in stack))
        if heap:
            vals.append(heap[0][0][0])
        return min(vals) if vals else np.inf

    while stack or heap:
        if nodes_solved >= node_cap:
            status = "node-limit"
            break
        if time.monotonic() - t_start > time_cap:
            status = "time-limit"
            break
        if incumbent is not None:
            b = open_bound()
            gap_now = (inc_obj - min(b, inc_obj)) / max(1.0, abs(inc_obj))
            if gap_now <= opts.gap_limit + 1e-15:
                status = "optimal"
                break

        if incumbent is None and stack:
            node = stack.pop()
        else:
            if stack:
                for n_ in stack:
                    heapq.heappush(heap, (n_.heap_key(), n_))
                stack.clear()
            node = heapq.heappop(heap)[1]

        if node.bound >= inc_obj - opts.tol_opt:
            continue

        lo, hi = node_bounds(node)
        res = lp_at(lo, hi)
        nodes_solved += 1
        if res.status == "infeasible":
            continue
        if res.status == "unbounded":
            raise SolverError("LP relaxation unbounded; model is ill-posed")
        if res.status == "iteration-limit":
            raise SolverError("LP iteration limit hit inside branch and bound")

        obj = res.objective
        if node.branch_col >= 0 and np.isfinite(node.bound):
            pseudo.update(node.branch_col, node.branch_up, obj - node.bound, node.branch_frac)
        if obj >= inc_obj - opts.tol_opt:
            continue
        x = res.primal
        frac_all = x[int_cols] - np.floor(x[int_cols])
        frac_all = np.minimum(frac_all, 1.0 - frac_all)
        frac_pos = np.flatnonzero(frac_all > opts.tol_int)

        if frac_pos.size == 0:
            snapped = np.round(x[int_cols])
            if int_cols.size and np.abs(x[int_cols] - snapped).max() > 1e-12:
                polished = fix_ints_and_solve(snapped, lo, hi)
                if polished is not None:
                    accept(polished)
                    continue
            xi = x.copy()
            if int_cols.size:
                xi[int_cols] = snapped
            accept(xi)
            continue

        if opts.dive_rounding and incumbent is None:
            vals = np.round(x[int_cols])
            push = np.abs(x[int_cols] - vals) > opts.tol_int
            vals[push] = np.ceil(x[int_cols][push])
            vals = np.clip(vals, lo[int_cols], hi[int_cols])
            hx = fix_ints_and_solve(vals, lo, hi)
            if hx is not None:
                accept(hx)

        cand = int_cols[frac_pos]
        f = frac_all[frac_pos]
        if opts.branching == "pseudo-cost" and pseudo.observations >= 8:
            score = pseudo.score(cand, f)
            best = score.max()
            ties = np.flatnonzero(score >= best - 1e-12)
        else:
            dist = np.abs(f - 0.5)
            best = dist.min()
            ties = np.flatnonzero(dist <= best + 1e-12)
        pick = int(ties[np.argmin(cand[ties])])
        bcol = int(cand[pick])
        bval = float(x[bcol])
        bfrac = bval - np.floor(bval)

        dn = _Node(obj, node.depth + 1, seq, dict(node.overrides_lo), dict(node.overrides_hi),
                   branch_col=bcol, branch_frac=bfrac, branch_up=False)
        dn.overrides_hi[bcol] = min(dn.overrides_hi.get(bcol, np.inf), np.floor(bval))
        seq += 1
        up = _Node(obj, node.depth + 1, seq, dict(node.overrides_lo), dict(node.overrides_hi),
                   branch_col=bcol, branch_frac=bfrac, branch_up=True)
        up.overrides_lo[bcol] = max(up.overrides_lo.get(bcol, -np.inf), np.ceil(bval))
        seq += 1

        if incumbent is None:
            stack.append(dn)
            stack.append(up)  # dive explores the round-up child first
        else:
            heapq.heappush(heap, (dn.heap_key(), dn))
            heapq.heappush(heap, (up.heap_key(), up))

    final_bound = open_bound()
    if incumbent is None:
        if status in ("node-limit", "time-limit"):
            return MipResult(status, None, np.inf, final_bound, nodes_solved, np.inf, total_lp_iters)
        return MipResult("infeasible", None, np.inf, np.inf, nodes_solved, np.inf, total_lp_iters)

    if status is None:
        status = "optimal"
    bound = inc_obj if (status == "optimal" and not (stack or heap)) else min(final_bound, inc_obj)
    gap = (inc_obj - bound) / max(1.0, abs(inc_obj))
    return MipResult(status, incumbent, float(inc_obj), float(bound), nodes_solved, float(gap), total_lp_iters)
