"""Exhaustive ground-truth optimizer for miniature instances.

Everything here is re-derived from the instance data alone, on purpose:
sharing code with the formulation module would let one bug hide another.
The enumeration walks every first-stage mode selection, then for each
scenario every integer second-stage candidate inside the caller's bounds.
Equality-constrained families are enumerated through their solution sets
(retailer deliveries as demand compositions, warehouse inflows as matching
compositions, plant shortage as the balance residual), which visits exactly
the assignments every other enumeration order would keep after filtering.

Only the default model conventions are supported: per-(period, scenario)
emission caps and probability-weighted delay charges.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .instance import Instance, ScenarioSet, StrategyConfig

__all__ = ["OracleGuardError", "enumerate_optimal", "check_point", "count_first_stage"]

GUARD = 10_000_000


class OracleGuardError(RuntimeError):
    """Search space exceeds the enumeration guard."""


def _active_counts(inst: Instance, cfg: StrategyConfig):
    s = inst.sets
    n_i = s.n_suppliers if cfg.backup_suppliers else s.n_suppliers_main
    n_j = s.n_manufacturers if cfg.temporary_facilities else s.n_manufacturers_main
    n_k = s.n_warehouses if cfg.temporary_facilities else s.n_warehouses_main
    return n_i, n_j, n_k


def _norm_bounds(bounds) -> dict[str, int]:
    names = ("X", "Y", "Z", "MI", "MSS", "SP")
    if isinstance(bounds, int):
        return {n: bounds for n in names}
    out = {n: 5 for n in names}
    unknown = set(bounds) - set(names)
    if unknown:
        raise ValueError(f"unknown bound keys: {sorted(unknown)}")
    out.update({k: int(v) for k, v in bounds.items()})
    return out


def count_first_stage(inst: Instance, cfg: StrategyConfig) -> int:
    """Number of first-stage combinations the oracle will walk."""
    n_i, n_j, n_k = _active_counts(inst, cfg)
    s = inst.sets
    slots = (n_i * n_j + n_j * n_k + n_k * s.n_retailers) * s.n_periods
    return (s.n_modes + 1) ** slots


def _compositions(total: int, parts: int, cap: int):
    """All tuples of `parts` ints in [0, cap] summing to `total`."""
    if parts == 0:
        return [()] if total == 0 else []
    out = []

    def rec(prefix, remaining, left):
        if left == 1:
            if 0 <= remaining <= cap:
                out.append(prefix + (remaining,))
            return
        lo = max(0, remaining - cap * (left - 1))
        hi = min(cap, remaining)
        for v in range(lo, hi + 1):
            rec(prefix + (v,), remaining - v, left - 1)

    rec((), total, parts)
    return out


@dataclass
class _Grid:
    """Flattened integer grid over per-slot value ranges."""

    values: np.ndarray  # (rows, n_slots)

    @classmethod
    def over(cls, sizes):
        if not sizes:
            return cls(np.zeros((1, 0), dtype=np.int64))
        rows = int(np.prod(sizes))
        vals = np.indices(sizes).reshape(len(sizes), rows).T
        return cls(np.ascontiguousarray(vals))


def enumerate_optimal(
    inst: Instance,
    scen: ScenarioSet,
    cfg: StrategyConfig,
    weights: tuple[float, float] = (1.0, 1.0),
    bounds: int | dict = 5,
):
    """Exhaustive optimum of the two-stage design; (objective, assignment).

    `bounds` caps every enumerated second-stage family, either uniformly
    (int) or per family ({"X": 5, "MI": 3, ...}).  Raises OracleGuardError
    once the walk would exceed 10^7 candidate evaluations.
    """
    b = _norm_bounds(bounds)
    w1, w2 = float(weights[0]), float(weights[1])
    n_i, n_j, n_k = _active_counts(inst, cfg)
    s = inst.sets
    n_m, n_t, n_l, n_s = s.n_retailers, s.n_periods, s.n_modes, s.n_scenarios
    main_j, main_k = s.n_manufacturers_main, s.n_warehouses_main
    pr = scen.probability

    n_first = count_first_stage(inst, cfg)
    if n_first > GUARD:
        raise OracleGuardError(
            f"{n_first} first-stage combinations exceed the {GUARD} guard"
        )
    budget = [GUARD]

    def spend(n):
        budget[0] -= n
        if budget[0] < 0:
            raise OracleGuardError(f"search space exceeds the {GUARD} guard")

    # expected (delay - saved)^+ per link-mode, charged once per selected slot
    def delay_charge(delay, saved, no, nd):
        eff = delay[:no, :nd] - (saved[:no, :nd, :, None] if cfg.info_sharing else 0.0)
        return inst.delay_cost * np.tensordot(np.maximum(eff, 0.0), pr, axes=([3], [0]))

    dch_sm = delay_charge(inst.transport_delay_sm, inst.saved_time_sm, n_i, n_j)
    dch_mw = delay_charge(inst.transport_delay_mw, inst.saved_time_mw, n_j, n_k)
    dch_wr = delay_charge(inst.transport_delay_wr, inst.saved_time_wr, n_k, n_m)

    rce = inst.emission_saving if cfg.info_sharing else 0.0
    et_sm = np.maximum(inst.emission_transport_sm[:n_i, :n_j] - rce, 0.0)
    et_mw = np.maximum(inst.emission_transport_mw[:n_j, :n_k] - rce, 0.0)
    et_wr = np.maximum(inst.emission_transport_wr[:n_k, :n_m] - rce, 0.0)

    info_const = (inst.info_setup + inst.info_training) if cfg.info_sharing else 0.0

    slots = [("sm", i, j, t) for i in range(n_i) for j in range(n_j) for t in range(n_t)]
    slots += [("mw", j, k, t) for j in range(n_j) for k in range(n_k) for t in range(n_t)]
    slots += [("wr", k, m, t) for k in range(n_k) for m in range(n_m) for t in range(n_t)]

    best_obj = math.inf
    best_assign = None

    for combo in itertools.product(range(n_l + 1), repeat=len(slots)):
        spend(1)
        sm = -np.ones((n_i, n_j, n_t), dtype=np.int64)
        mw = -np.ones((n_j, n_k, n_t), dtype=np.int64)
        wr = -np.ones((n_k, n_m, n_t), dtype=np.int64)
        for (kind, a, bb, t), choice in zip(slots, combo):
            if choice == 0:
                continue
            (sm if kind == "sm" else mw if kind == "mw" else wr)[a, bb, t] = choice - 1

        if cfg.multiple_sourcing:
            picked = (sm >= 0).sum(axis=0)  # (n_j, n_t)
            if (picked < inst.min_suppliers).any():
                continue

        # routing must exist wherever demand is positive, in every scenario
        wr_active_mt = (wr >= 0).any(axis=0)  # (n_m, n_t)
        if ((scen.demand[:, :, :].max(axis=2) > 0) & ~wr_active_mt).any():
            continue

        c1 = 0.0
        for arr, dch in ((sm, dch_sm), (mw, dch_mw), (wr, dch_wr)):
            sel = arr >= 0
            if sel.any():
                o, d, t = np.nonzero(sel)
                c1 += float(dch[o, d, arr[sel]].sum())

        setup = info_const
        if cfg.temporary_facilities:
            for j in range(main_j, n_j):
                if (mw[j] >= 0).any():
                    setup += inst.setup_temp_mfg[j - main_j]
            for k in range(main_k, n_k):
                if (wr[k] >= 0).any() or (mw[:, k] >= 0).any():
                    setup += inst.setup_temp_wh[k - main_k]

        first_cost = w1 * (c1 + setup)
        if first_cost >= best_obj:
            continue

        total = first_cost
        per_scen = []
        feasible = True
        for sc in range(n_s):
            out = _scenario_best(
                inst, scen, cfg, sm, mw, wr, sc,
                n_i, n_j, n_k, et_sm, et_mw, et_wr, b, w1, w2, spend,
            )
            if out is None:
                feasible = False
                break
            val, assign = out
            total += pr[sc] * val
            per_scen.append(assign)
            if total >= best_obj:
                feasible = False  # scenario costs are nonnegative
                break
        if not feasible or total >= best_obj:
            continue

        best_obj = total
        best_assign = {
            "XX": _mode_tensor(sm, n_l),
            "YY": _mode_tensor(mw, n_l),
            "ZZ": _mode_tensor(wr, n_l),
        }
        for fam in per_scen[0]:
            best_assign[fam] = np.stack([p[fam] for p in per_scen], axis=-1)
        if cfg.temporary_facilities:
            best_assign["U"] = np.array(
                [1.0 if (mw[j] >= 0).any() else 0.0 for j in range(main_j, n_j)]
            )
            best_assign["V"] = np.array(
                [
                    1.0 if ((wr[k] >= 0).any() or (mw[:, k] >= 0).any()) else 0.0
                    for k in range(main_k, n_k)
                ]
            )

    if best_assign is None:
        return math.inf, None
    return best_obj, best_assign


def _mode_tensor(modes: np.ndarray, n_l: int) -> np.ndarray:
    """(o, d, t) mode choices -> 0/1 tensor over (o, d, t, mode)."""
    out = np.zeros(modes.shape + (n_l,))
    sel = modes >= 0
    o, d, t = np.nonzero(sel)
    out[o, d, t, modes[sel]] = 1.0
    return out


def _scenario_best(
    inst, scen, cfg, sm, mw, wr, sc,
    n_i, n_j, n_k, et_sm, et_mw, et_wr, b, w1, w2, spend,
):
    """Minimum scenario cost w1*(C2+C3+C4) + w2*E over the candidate grid."""
    s = inst.sets
    n_m, n_t = s.n_retailers, s.n_periods
    demand = scen.demand[:, :, sc]
    cap_row = inst.cap
    mc = inst.mfg_capacity[:n_j] * (1.0 - scen.mfg_capacity_loss[:n_j, sc])
    wc = inst.wh_capacity[:n_k] * (1.0 - scen.wh_capacity_loss[:n_k, sc])

    # deliveries: per (m, t) compose the demand over active (k, mode) slots
    z_slots: dict[tuple[int, int], list[tuple[int, int]]] = {}
    z_opts: list[list[tuple]] = []
    z_keys: list[tuple[int, int]] = []
    for m in range(n_m):
        for t in range(n_t):
            active = [(k, wr[k, m, t]) for k in range(n_k) if wr[k, m, t] >= 0]
            need = int(round(demand[m, t]))
            if abs(demand[m, t] - need) > 1e-9:
                raise ValueError("oracle requires integral demand")
            comps = _compositions(need, len(active), b["Z"])
            if not comps:
                return None
            z_slots[(m, t)] = active
            z_keys.append((m, t))
            z_opts.append(comps)

    mss_on, sp_on = cfg.safety_stock, cfg.stockpiling
    x_slots = [(i, j, t, sm[i, j, t]) for i in range(n_i) for j in range(n_j)
               for t in range(n_t) if sm[i, j, t] >= 0]
    grid_dims = [b["X"] + 1] * len(x_slots) + [b["MI"] + 1] * (n_j * n_t)
    if mss_on:
        grid_dims += [b["MSS"] + 1] * (n_j * n_t)
    if sp_on:
        grid_dims += [b["SP"] + 1] * (n_j * n_t)
    grid = _Grid.over(grid_dims)
    rows = grid.values.shape[0]

    nx = len(x_slots)
    xs = grid.values[:, :nx]
    mi = grid.values[:, nx : nx + n_j * n_t].reshape(rows, n_j, n_t)
    pos = nx + n_j * n_t
    if mss_on:
        mss = grid.values[:, pos : pos + n_j * n_t].reshape(rows, n_j, n_t)
        pos += n_j * n_t
    else:
        mss = np.zeros((rows, n_j, n_t), dtype=np.int64)
    if sp_on:
        spv = grid.values[:, pos : pos + n_j * n_t].reshape(rows, n_j, n_t)
    else:
        spv = np.zeros((rows, n_j, n_t), dtype=np.int64)

    # per-candidate inflow to each plant-period
    x_in = np.zeros((rows, n_j, n_t))
    x_cost = np.zeros(rows)
    x_emis_t = np.zeros((rows, n_t))
    for col, (i, j, t, l) in enumerate(x_slots):
        v = xs[:, col]
        x_in[:, j, t] += v
        x_cost = x_cost + v * inst.transport_cost_sm[i, j, l, sc]
        x_emis_t[:, t] += v * et_sm[i, j, l]

    hold = inst.inv_cost[:n_j, sc]
    shortc = inst.short_cost[:n_j, sc]
    inv_cost = (mi * hold[None, :, None]).sum(axis=(1, 2)).astype(float)
    if mss_on:
        inv_cost += (mss * hold[None, :, None]).sum(axis=(1, 2))
    if sp_on:
        inv_cost += inst.stockpile_premium * spv.sum(axis=(1, 2))

    best_val = math.inf
    best = None

    for z_combo in itertools.product(*z_opts) if z_opts else [()]:
        z_flow = np.zeros((n_k, n_m, n_t, s.n_modes))
        for (m, t), comp in zip(z_keys, z_combo):
            for (k, l), v in zip(z_slots[(m, t)], comp):
                z_flow[k, m, t, l] = v
        k_tot = z_flow.sum(axis=(1, 3))  # (n_k, n_t)
        if (k_tot > wc[:, None] + 1e-9).any():
            continue
        z_cost = float(np.einsum("kmtl,kml->", z_flow, inst.transport_cost_wr[:n_k, :n_m, :, sc]))
        z_emis_t = np.einsum("kmtl,kml->t", z_flow, et_wr)

        # warehouse inflow must match delivery totals slot by slot
        y_opts = []
        y_keys = []
        ok = True
        for k in range(n_k):
            for t in range(n_t):
                active = [(j, mw[j, k, t]) for j in range(n_j) if mw[j, k, t] >= 0]
                comps = _compositions(int(round(k_tot[k, t])), len(active), b["Y"])
                if not comps:
                    ok = False
                    break
                y_keys.append((k, t))
                y_opts.append(comps)
            if not ok:
                break
        if not ok:
            continue

        for y_combo in itertools.product(*y_opts) if y_opts else [()]:
            y_flow = np.zeros((n_j, n_k, n_t, s.n_modes))
            for (k, t), comp in zip(y_keys, y_combo):
                for (j, l), v in zip(y_opts_slots(mw, k, t, n_j), comp):
                    y_flow[j, k, t, l] = v
            j_out = y_flow.sum(axis=(1, 3))  # (n_j, n_t)
            if (j_out > mc[:, None] + 1e-9).any():
                continue
            y_cost = float(np.einsum("jktl,jkl->", y_flow, inst.transport_cost_mw[:n_j, :n_k, :, sc]))
            y_emis_t = np.einsum("jktl,jkl->t", y_flow, et_mw) + np.einsum(
                "jktl,j->t", y_flow, inst.emission_prod[:n_j]
            )

            spend(rows)
            # shortage falls out of the balance recursion; must stay >= 0
            ms = np.zeros((rows, n_j, n_t))
            feas = np.ones(rows, dtype=bool)
            for t in range(n_t):
                prev_mi = mi[:, :, t - 1] if t else 0.0
                prev_ms = ms[:, :, t - 1] if t else 0.0
                prev_mss = mss[:, :, t - 1] if t else 0.0
                ms[:, :, t] = (
                    j_out[None, :, t] + mi[:, :, t] + prev_ms + mss[:, :, t]
                    - x_in[:, :, t] - prev_mi - prev_mss - spv[:, :, t]
                )
            feas &= (ms >= -1e-9).all(axis=(1, 2))
            emis_t = x_emis_t + (y_emis_t + z_emis_t)[None, :]
            feas &= (emis_t <= cap_row[None, :] + 1e-9).all(axis=1)
            if not feas.any():
                continue

            short_cost = (ms * shortc[None, :, None]).sum(axis=(1, 2))
            val = w1 * (x_cost + y_cost + z_cost + inv_cost + short_cost) + w2 * emis_t.sum(axis=1)
            val = np.where(feas, val, math.inf)
            r = int(np.argmin(val))
            if val[r] < best_val:
                best_val = float(val[r])
                x_flow = np.zeros((n_i, n_j, n_t, s.n_modes))
                for col, (i, j, t, l) in enumerate(x_slots):
                    x_flow[i, j, t, l] = xs[r, col]
                best = {
                    "X": x_flow,
                    "Y": y_flow.copy(),
                    "Z": z_flow.copy(),
                    "MI": mi[r].astype(float),
                    "MS": ms[r].copy(),
                }
                if mss_on:
                    best["MSS"] = mss[r].astype(float)
                if sp_on:
                    best["SP"] = spv[r].astype(float)

    if best is None:
        return None
    return best_val, best


def y_opts_slots(mw, k, t, n_j):
    return [(j, mw[j, k, t]) for j in range(n_j) if mw[j, k, t] >= 0]


# ---------------------------------------------------------------------------
# from-scratch feasibility checker (independent of the formulation module)
# ---------------------------------------------------------------------------


def check_point(
    inst: Instance,
    scen: ScenarioSet,
    cfg: StrategyConfig,
    point: dict[str, np.ndarray],
    tol: float = 1e-6,
    cap_mode: str = "per-scenario",
) -> list[str]:
    """Constraint violations of a full assignment, straight from the data.

    `point` holds per-family tensors over the active index space: XX/YY/ZZ
    (o, d, t, mode), X/Y/Z (o, d, t, mode, scenario), MI/MS[/MSS/SP]
    (plant, t, scenario), and optionally U/V opening indicators.
    """
    n_i, n_j, n_k = _active_counts(inst, cfg)
    s = inst.sets
    n_m, n_t, n_l, n_s = s.n_retailers, s.n_periods, s.n_modes, s.n_scenarios
    big_m = inst.big_m
    out: list[str] = []

    xx, yy, zz = point["XX"], point["YY"], point["ZZ"]
    xf, yf, zf = point["X"], point["Y"], point["Z"]
    mi, ms = point["MI"], point["MS"]
    mss = point.get("MSS")
    spv = point.get("SP")

    def note(name, *idx):
        out.append(f"{name}[{','.join(str(i + 1) for i in idx)}]")

    for name, flow, sel in (("link_sm", xf, xx), ("link_mw", yf, yy), ("link_wr", zf, zz)):
        bad = flow > big_m * sel[..., None] + tol
        for idx in zip(*np.nonzero(bad)):
            note(name, *idx)

    for name, sel in (("mode_sm", xx), ("mode_mw", yy), ("mode_wr", zz)):
        bad = sel.sum(axis=3) > 1 + tol
        for idx in zip(*np.nonzero(bad)):
            note(name, *idx)

    for sc in range(n_s):
        for j in range(n_j):
            for t in range(n_t):
                inflow = xf[:, j, t, :, sc].sum()
                outflow = yf[j, :, t, :, sc].sum()
                bal = inflow + (mi[j, t - 1, sc] if t else 0.0) + ms[j, t, sc]
                bal -= outflow + mi[j, t, sc] + (ms[j, t - 1, sc] if t else 0.0)
                if mss is not None:
                    bal += (mss[j, t - 1, sc] if t else 0.0) - mss[j, t, sc]
                if spv is not None:
                    bal += spv[j, t, sc]
                if abs(bal) > tol:
                    note("balance", j, t, sc)
        for k in range(n_k):
            for t in range(n_t):
                if abs(yf[:, k, t, :, sc].sum() - zf[k, :, t, :, sc].sum()) > tol:
                    note("wh_flow", k, t, sc)
        for m in range(n_m):
            for t in range(n_t):
                if abs(zf[:, m, t, :, sc].sum() - scen.demand[m, t, sc]) > tol:
                    note("demand", m, t, sc)
        for j in range(n_j):
            lim = inst.mfg_capacity[j] * (1 - scen.mfg_capacity_loss[j, sc])
            for t in range(n_t):
                if yf[j, :, t, :, sc].sum() > lim + tol:
                    note("mfg_cap", j, t, sc)
        for k in range(n_k):
            lim = inst.wh_capacity[k] * (1 - scen.wh_capacity_loss[k, sc])
            for t in range(n_t):
                if zf[k, :, t, :, sc].sum() > lim + tol:
                    note("wh_cap", k, t, sc)

    rce = inst.emission_saving if cfg.info_sharing else 0.0
    et_sm = np.maximum(inst.emission_transport_sm[:n_i, :n_j] - rce, 0.0)
    et_mw = np.maximum(inst.emission_transport_mw[:n_j, :n_k] - rce, 0.0)
    et_wr = np.maximum(inst.emission_transport_wr[:n_k, :n_m] - rce, 0.0)
    emis_ts = (
        np.einsum("ijtls,ijl->ts", xf, et_sm)
        + np.einsum("jktls,jkl->ts", yf, et_mw)
        + np.einsum("jktls,j->ts", yf, inst.emission_prod[:n_j])
        + np.einsum("kmtls,kml->ts", zf, et_wr)
    )
    if cap_mode == "per-scenario":
        for t, sc in zip(*np.nonzero(emis_ts > inst.cap[:, None] + tol)):
            note("cap", t, sc)
    else:
        for t in np.nonzero(emis_ts.sum(axis=1) > inst.cap + tol)[0]:
            note("cap", t)

    if cfg.multiple_sourcing:
        picked = xx.sum(axis=(0, 3))  # (n_j, n_t)
        for j, t in zip(*np.nonzero(picked < inst.min_suppliers - tol)):
            note("min_suppliers", j, t)

    if cfg.temporary_facilities:
        main_j, main_k = s.n_manufacturers_main, s.n_warehouses_main
        u = point.get("U", np.zeros(n_j - main_j))
        v = point.get("V", np.zeros(n_k - main_k))
        for j in range(main_j, n_j):
            if (yy[j] > u[j - main_j] + tol).any():
                note("act_mfg", j)
        for k in range(main_k, n_k):
            if (zz[k] > v[k - main_k] + tol).any() or (yy[:, k] > v[k - main_k] + tol).any():
                note("act_wh", k)

    negatives = [("X", xf), ("Y", yf), ("Z", zf), ("MI", mi), ("MS", ms)]
    if mss is not None:
        negatives.append(("MSS", mss))
    if spv is not None:
        negatives.append(("SP", spv))
    for name, arr in negatives:
        if (np.asarray(arr) < -tol).any():
            out.append(f"nonneg:{name}")

    return out
