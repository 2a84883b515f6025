"""Scratch: random LPs vs scipy.optimize.linprog (HiGHS)."""
import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from scnd.simplex import SolverOptions, solve_lp_arrays

rng = np.random.default_rng(0)
opts = SolverOptions()

n_match = n_infeas = 0
for trial in range(200):
    m = rng.integers(1, 12)
    n = rng.integers(1, 15)
    a = np.round(rng.uniform(-3, 3, (m, n)) * (rng.random((m, n)) < 0.6), 2)
    rel = rng.choice(["L", "E", "G"], m, p=[0.5, 0.2, 0.3])
    rhs = np.round(rng.uniform(-5, 10, m), 2)
    c = np.round(rng.uniform(-5, 5, n), 2)
    lo = np.zeros(n)
    hi = np.where(rng.random(n) < 0.7, rng.uniform(1, 10, n), np.inf)
    hi = np.round(hi, 2)

    res = solve_lp_arrays(sp.csr_matrix(a), rel, rhs, c, lo, hi, opts)

    a_ub = np.vstack([a[rel == "L"], -a[rel == "G"]]) if m else None
    b_ub = np.concatenate([rhs[rel == "L"], -rhs[rel == "G"]])
    a_eq = a[rel == "E"]
    b_eq = rhs[rel == "E"]
    ref = linprog(
        c,
        A_ub=a_ub if len(b_ub) else None, b_ub=b_ub if len(b_ub) else None,
        A_eq=a_eq if len(b_eq) else None, b_eq=b_eq if len(b_eq) else None,
        bounds=list(zip(lo, [None if not np.isfinite(h) else h for h in hi])),
        method="highs",
    )
    if ref.status == 2:
        if res.status != "infeasible":
            print(f"[{trial}] scipy infeasible, ours {res.status} obj={res.objective}")
        else:
            n_infeas += 1
        continue
    if ref.status == 3:
        if res.status != "unbounded":
            print(f"[{trial}] scipy unbounded, ours {res.status}")
        continue
    if res.status != "optimal":
        print(f"[{trial}] scipy optimal {ref.fun}, ours {res.status}")
        continue
    if abs(res.objective - ref.fun) > 1e-6 * (1 + abs(ref.fun)):
        print(f"[{trial}] obj mismatch ours={res.objective} scipy={ref.fun}")
        continue
    if abs(res.dual_objective - res.objective) > 1e-6 * (1 + abs(res.objective)):
        print(f"[{trial}] duality gap ours={res.objective} dual={res.dual_objective}")
        continue
    n_match += 1

print(f"matched optimal: {n_match}, matched infeasible: {n_infeas} / 200")
