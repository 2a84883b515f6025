import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from scnd.simplex import SolverOptions, solve_lp_arrays

rng = np.random.default_rng(0)
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
    if trial != 145:
        continue
    res = solve_lp_arrays(sp.csr_matrix(a), rel, rhs, c, lo, hi, SolverOptions())
    print("ours:", res.status, res.objective, res.iterations)
    # which rows are violated at x=0 etc
    print("m,n:", m, n)
    print("rel:", rel)
    print("rhs:", rhs)
    print("a:\n", a)
    print("hi:", hi)
    print("c:", c)
