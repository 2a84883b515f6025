"""Deterministic-equivalent MILP assembly from an instance + strategy config.

Column layout is family-contiguous (XX, YY, ZZ, U, V, X, Y, Z, MI, MS,
[MSS], [SP]) so per-family slices reshape directly to their index tensors.
Row families: big-M linking, single-mode selection, plant balance,
warehouse flow-through, retailer demand, emission cap, minimum suppliers,
plant/warehouse capacity, temporary-facility activation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .instance import Instance, ScenarioSet, StrategyConfig, validate_instance

__all__ = [
    "VariableMap",
    "MilpModel",
    "ObjectiveBreakdown",
    "Violation",
    "ModelConfigError",
    "build_model",
    "evaluate_solution",
    "check_feasibility",
]

LE, EQ, GE = "L", "E", "G"


class ModelConfigError(ValueError):
    """Inconsistent strategy configuration, reported before any row is built."""


@dataclass(frozen=True)
class _Family:
    name: str
    start: int
    shape: tuple[int, ...]
    # index offsets turn 0-based positions into the 1-based entity labels
    # used in tags and reports (backup/temp entities keep their global label)
    offsets: tuple[int, ...]

    @property
    def size(self) -> int:
        return int(np.prod(self.shape)) if self.shape else 0


class VariableMap:
    """Bijection between variable tuples and column indices, plus bounds."""

    def __init__(self):
        self._families: dict[str, _Family] = {}
        self.n_cols = 0
        self.lower: np.ndarray | None = None
        self.upper: np.ndarray | None = None
        self.is_int: np.ndarray | None = None
        self._bounds_chunks: list[tuple[np.ndarray, np.ndarray, np.ndarray]] = []

    def add_family(self, name, shape, lower, upper, integer, offsets=None):
        fam = _Family(name, self.n_cols, tuple(shape), tuple(offsets or (0,) * len(shape)))
        self._families[name] = fam
        n = fam.size
        self.n_cols += n
        lo = np.broadcast_to(np.asarray(lower, dtype=float), fam.shape).reshape(n).copy()
        hi = np.broadcast_to(np.asarray(upper, dtype=float), fam.shape).reshape(n).copy()
        ii = np.broadcast_to(np.asarray(integer, dtype=bool), fam.shape).reshape(n).copy()
        self._bounds_chunks.append((lo, hi, ii))
        return fam

    def finish(self):
        if self._bounds_chunks:
            self.lower = np.concatenate([c[0] for c in self._bounds_chunks])
            self.upper = np.concatenate([c[1] for c in self._bounds_chunks])
            self.is_int = np.concatenate([c[2] for c in self._bounds_chunks])
        else:
            self.lower = np.zeros(0)
            self.upper = np.zeros(0)
            self.is_int = np.zeros(0, dtype=bool)
        for arr in (self.lower, self.upper, self.is_int):
            arr.setflags(write=False)

    @property
    def families(self) -> tuple[str, ...]:
        return tuple(self._families)

    def has(self, name: str) -> bool:
        return name in self._families and self._families[name].size > 0

    def family(self, name: str) -> _Family:
        return self._families[name]

    def col(self, name: str, *idx: int) -> int:
        fam = self._families[name]
        return fam.start + int(np.ravel_multi_index(idx, fam.shape))

    def cols(self, name: str) -> np.ndarray:
        fam = self._families[name]
        return np.arange(fam.start, fam.start + fam.size)

    def slice(self, name: str) -> slice:
        fam = self._families[name]
        return slice(fam.start, fam.start + fam.size)

    def values(self, name: str, x: np.ndarray) -> np.ndarray:
        """Family slice of an assignment, reshaped to the family's tensor."""
        fam = self._families[name]
        return np.asarray(x)[fam.start : fam.start + fam.size].reshape(fam.shape)

    def describe(self, col: int) -> tuple[str, tuple[int, ...]]:
        for fam in self._families.values():
            if fam.start <= col < fam.start + fam.size:
                raw = np.unravel_index(col - fam.start, fam.shape)
                return fam.name, tuple(int(r) + 1 + o for r, o in zip(raw, fam.offsets))
        raise IndexError(f"column {col} out of range")

    def tag(self, col: int) -> str:
        name, idx = self.describe(col)
        return name + "[" + ",".join(str(i) for i in idx) + "]"


@dataclass(frozen=True)
class ObjectiveBreakdown:
    """Cost/emission decomposition recomputed from instance data."""

    delay_cost: float  # first-stage delay charge
    transport_cost: np.ndarray  # per scenario
    inventory_cost: np.ndarray  # per scenario (holding + safety-stock upkeep + stockpile premium)
    shortage_cost: np.ndarray  # per scenario
    emission: np.ndarray  # per scenario, kgCO2
    setup_cost: float  # temporary-facility openings + information system
    z1: float
    z2: float
    z_total: float


@dataclass(frozen=True)
class Violation:
    kind: str  # "row" | "bound" | "integrality"
    family: str
    index: tuple[int, ...]
    amount: float

    def __str__(self) -> str:
        where = ",".join(str(i) for i in self.index)
        return f"{self.kind}:{self.family}[{where}] by {self.amount:.3e}"


@dataclass
class MilpModel:
    """Sparse rows + dual objectives over a fixed column layout.

    Immutable by convention once built; safe to share across workers.
    """

    var_map: VariableMap
    a_matrix: sp.csr_matrix
    relations: np.ndarray  # '<U1' entries in {L, E, G}
    rhs: np.ndarray
    row_tags: list[tuple[str, tuple[int, ...]]]
    objective_cost: np.ndarray  # Z1 coefficients per column
    objective_emission: np.ndarray  # Z2 coefficients per column
    objective_cost_const: float
    weights: tuple[float, float]
    instance: Instance
    scenarios: ScenarioSet
    config: StrategyConfig
    cap_mode: str = "per-scenario"
    delay_mode: str = "expected"
    integrality: str = "relaxed"

    @property
    def n_rows(self) -> int:
        return self.a_matrix.shape[0]

    @property
    def n_cols(self) -> int:
        return self.var_map.n_cols

    def combined_objective(self) -> np.ndarray:
        w1, w2 = self.weights
        return w1 * self.objective_cost + w2 * self.objective_emission

    def combined_constant(self) -> float:
        return self.weights[0] * self.objective_cost_const

    def stats(self) -> dict:
        """Rows/columns/nonzeros per family, for the `inspect` command."""
        col_stats = {}
        for name in self.var_map.families:
            fam = self.var_map.family(name)
            if fam.size:
                col_stats[name] = fam.size
        row_stats: dict[str, dict] = {}
        indptr = self.a_matrix.indptr
        for r, (family, _) in enumerate(self.row_tags):
            st = row_stats.setdefault(family, {"rows": 0, "nonzeros": 0})
            st["rows"] += 1
            st["nonzeros"] += int(indptr[r + 1] - indptr[r])
        return {
            "columns": self.n_cols,
            "rows": self.n_rows,
            "nonzeros": int(self.a_matrix.nnz),
            "integer_columns": int(self.var_map.is_int.sum()),
            "column_families": col_stats,
            "row_families": row_stats,
        }


class _RowBuilder:
    def __init__(self, n_cols: int):
        self.n_cols = n_cols
        self.data: list[float] = []
        self.cols: list[int] = []
        self.indptr: list[int] = [0]
        self.relations: list[str] = []
        self.rhs: list[float] = []
        self.tags: list[tuple[str, tuple[int, ...]]] = []

    def add(self, cols, coefs, rel, rhs, family, index):
        for c, a in zip(cols, coefs):
            if a != 0.0:
                self.cols.append(int(c))
                self.data.append(float(a))
        self.indptr.append(len(self.cols))
        self.relations.append(rel)
        self.rhs.append(float(rhs))
        self.tags.append((family, tuple(int(i) for i in index)))

    def build(self) -> tuple[sp.csr_matrix, np.ndarray, np.ndarray]:
        a = sp.csr_matrix(
            (np.asarray(self.data), np.asarray(self.cols, dtype=np.int32), np.asarray(self.indptr, dtype=np.int32)),
            shape=(len(self.rhs), self.n_cols),
        )
        return a, np.asarray(self.relations, dtype="<U1"), np.asarray(self.rhs)


def _active_counts(inst: Instance, cfg: StrategyConfig) -> tuple[int, int, int]:
    s = inst.sets
    n_i = s.n_suppliers if cfg.backup_suppliers else s.n_suppliers_main
    n_j = s.n_manufacturers if cfg.temporary_facilities else s.n_manufacturers_main
    n_k = s.n_warehouses if cfg.temporary_facilities else s.n_warehouses_main
    return n_i, n_j, n_k


def _check_config(inst: Instance, cfg: StrategyConfig, weights) -> None:
    w1, w2 = weights
    if w1 < 0 or w2 < 0 or (w1 == 0 and w2 == 0):
        raise ModelConfigError("objective weights must be nonnegative and not both zero")
    if cfg.multiple_sourcing:
        n_active_suppliers = _active_counts(inst, cfg)[0]
        if inst.min_suppliers < 2:
            raise ModelConfigError(
                "multiple_sourcing requires min_suppliers >= 2 "
                f"(instance has {inst.min_suppliers})"
            )
        if inst.min_suppliers > n_active_suppliers:
            raise ModelConfigError(
                f"multiple_sourcing needs {inst.min_suppliers} suppliers but only "
                f"{n_active_suppliers} are active"
            )


def _delay_coeffs(inst: Instance, cfg: StrategyConfig, pr: np.ndarray, delay_mode: str):
    """Per-link-mode delay charges on the selection binaries (first stage)."""
    weights = pr if delay_mode == "expected" else np.ones_like(pr)
    out = []
    for delay, saved in (
        (inst.transport_delay_sm, inst.saved_time_sm),
        (inst.transport_delay_mw, inst.saved_time_mw),
        (inst.transport_delay_wr, inst.saved_time_wr),
    ):
        eff = delay - saved[:, :, :, None] if cfg.info_sharing else delay
        eff = np.maximum(eff, 0.0)
        out.append(inst.delay_cost * np.tensordot(eff, weights, axes=([3], [0])))
    return out  # list of (origin, dest, mode) arrays


def _emission_coeffs(inst: Instance, cfg: StrategyConfig):
    """Transport emission factors, reduced (and floored at 0) under info sharing."""
    cut = inst.emission_saving if cfg.info_sharing else 0.0
    return (
        np.maximum(inst.emission_transport_sm - cut, 0.0),
        np.maximum(inst.emission_transport_mw - cut, 0.0),
        np.maximum(inst.emission_transport_wr - cut, 0.0),
    )


def build_model(
    inst: Instance,
    scen: ScenarioSet,
    cfg: StrategyConfig,
    weights: tuple[float, float] = (1.0, 1.0),
    *,
    cap_mode: str = "per-scenario",
    delay_mode: str = "expected",
    integrality: str = "relaxed",
) -> MilpModel:
    """Assemble the deterministic-equivalent two-stage MILP.

    cap_mode "per-scenario" enforces the emission cap in every (period,
    scenario); "literal" emits one row per period summing over scenarios.
    delay_mode "expected" weights the delay charge by scenario probability;
    "literal" sums it unweighted.  integrality "relaxed" keeps flows and
    inventories continuous; "full" makes every column integral.
    """
    if cap_mode not in ("per-scenario", "literal"):
        raise ModelConfigError(f"unknown cap_mode {cap_mode!r}")
    if delay_mode not in ("expected", "literal"):
        raise ModelConfigError(f"unknown delay_mode {delay_mode!r}")
    if integrality not in ("relaxed", "full"):
        raise ModelConfigError(f"unknown integrality {integrality!r}")
    issues = validate_instance(inst, scen)
    if issues:
        raise ModelConfigError(
            "instance fails validation: " + "; ".join(str(i) for i in issues[:5])
        )
    _check_config(inst, cfg, weights)

    s = inst.sets
    n_i, n_j, n_k = _active_counts(inst, cfg)
    n_m, n_t, n_l, n_s = s.n_retailers, s.n_periods, s.n_modes, s.n_scenarios
    main_j, main_k = s.n_manufacturers_main, s.n_warehouses_main
    n_tj = n_j - main_j if cfg.temporary_facilities else 0
    n_tk = n_k - main_k if cfg.temporary_facilities else 0
    big_m = inst.big_m
    pr = scen.probability
    flows_int = integrality == "full"

    vm = VariableMap()
    vm.add_family("XX", (n_i, n_j, n_t, n_l), 0.0, 1.0, True)
    vm.add_family("YY", (n_j, n_k, n_t, n_l), 0.0, 1.0, True)
    vm.add_family("ZZ", (n_k, n_m, n_t, n_l), 0.0, 1.0, True)
    vm.add_family("U", (n_tj,), 0.0, 1.0, True, offsets=(main_j,))
    vm.add_family("V", (n_tk,), 0.0, 1.0, True, offsets=(main_k,))
    ub_y = np.minimum(big_m, inst.mfg_capacity[:n_j])
    ub_z = np.minimum(big_m, inst.wh_capacity[:n_k])
    vm.add_family("X", (n_i, n_j, n_t, n_l, n_s), 0.0, big_m, flows_int)
    vm.add_family(
        "Y", (n_j, n_k, n_t, n_l, n_s), 0.0,
        np.broadcast_to(ub_y[:, None, None, None, None], (n_j, n_k, n_t, n_l, n_s)),
        flows_int,
    )
    vm.add_family(
        "Z", (n_k, n_m, n_t, n_l, n_s), 0.0,
        np.broadcast_to(ub_z[:, None, None, None, None], (n_k, n_m, n_t, n_l, n_s)),
        flows_int,
    )
    vm.add_family("MI", (n_j, n_t, n_s), 0.0, np.inf, flows_int)
    vm.add_family("MS", (n_j, n_t, n_s), 0.0, np.inf, flows_int)
    if cfg.safety_stock:
        vm.add_family("MSS", (n_j, n_t, n_s), 0.0, np.inf, flows_int)
    if cfg.stockpiling:
        vm.add_family("SP", (n_j, n_t, n_s), 0.0, np.inf, flows_int)
    vm.finish()

    rows = _RowBuilder(vm.n_cols)

    link_specs = (
        ("link_sm", "X", "XX", (n_i, n_j)),
        ("link_mw", "Y", "YY", (n_j, n_k)),
        ("link_wr", "Z", "ZZ", (n_k, n_m)),
    )
    # (a) big-M linking: flow <= big_m * selection binary
    for fam_name, flow, sel, (n_o, n_d) in link_specs:
        for o in range(n_o):
            for d in range(n_d):
                for t in range(n_t):
                    for l in range(n_l):
                        b = vm.col(sel, o, d, t, l)
                        for sc in range(n_s):
                            rows.add(
                                (vm.col(flow, o, d, t, l, sc), b),
                                (1.0, -big_m),
                                LE, 0.0, fam_name,
                                (o + 1, d + 1, t + 1, l + 1, sc + 1),
                            )

    # (b) one transport mode per origin-destination-period
    for fam_name, sel, (n_o, n_d) in (
        ("mode_sm", "XX", (n_i, n_j)),
        ("mode_mw", "YY", (n_j, n_k)),
        ("mode_wr", "ZZ", (n_k, n_m)),
    ):
        for o in range(n_o):
            for d in range(n_d):
                for t in range(n_t):
                    rows.add(
                        [vm.col(sel, o, d, t, l) for l in range(n_l)],
                        [1.0] * n_l,
                        LE, 1.0, fam_name, (o + 1, d + 1, t + 1),
                    )

    # (c) plant balance; exact form depends on the inventory strategies
    has_mss = cfg.safety_stock
    has_sp = cfg.stockpiling
    for j in range(n_j):
        for t in range(n_t):
            for sc in range(n_s):
                cols = [vm.col("X", i, j, t, l, sc) for i in range(n_i) for l in range(n_l)]
                coefs = [1.0] * len(cols)
                cols += [vm.col("Y", j, k, t, l, sc) for k in range(n_k) for l in range(n_l)]
                coefs += [-1.0] * (n_k * n_l)
                cols += [vm.col("MI", j, t, sc), vm.col("MS", j, t, sc)]
                coefs += [-1.0, 1.0]
                if t > 0:
                    cols += [vm.col("MI", j, t - 1, sc), vm.col("MS", j, t - 1, sc)]
                    coefs += [1.0, -1.0]
                if has_mss:
                    cols.append(vm.col("MSS", j, t, sc))
                    coefs.append(-1.0)
                    if t > 0:
                        cols.append(vm.col("MSS", j, t - 1, sc))
                        coefs.append(1.0)
                if has_sp:
                    cols.append(vm.col("SP", j, t, sc))
                    coefs.append(1.0)
                rows.add(cols, coefs, EQ, 0.0, "balance", (j + 1, t + 1, sc + 1))

    # (d) warehouses hold nothing: inflow equals outflow each period
    for k in range(n_k):
        for t in range(n_t):
            for sc in range(n_s):
                cols = [vm.col("Y", j, k, t, l, sc) for j in range(n_j) for l in range(n_l)]
                coefs = [1.0] * len(cols)
                cols += [vm.col("Z", k, m, t, l, sc) for m in range(n_m) for l in range(n_l)]
                coefs += [-1.0] * (n_m * n_l)
                rows.add(cols, coefs, EQ, 0.0, "wh_flow", (k + 1, t + 1, sc + 1))

    # (e) retailer demand met exactly
    for m in range(n_m):
        for t in range(n_t):
            for sc in range(n_s):
                cols = [vm.col("Z", k, m, t, l, sc) for k in range(n_k) for l in range(n_l)]
                rows.add(cols, [1.0] * len(cols), EQ, scen.demand[m, t, sc], "demand", (m + 1, t + 1, sc + 1))

    # (f) emission cap
    et_sm, et_mw, et_wr = _emission_coeffs(inst, cfg)

    def emission_row(t, scenarios_in_row):
        cols: list[int] = []
        coefs: list[float] = []
        for sc in scenarios_in_row:
            for i in range(n_i):
                for j in range(n_j):
                    for l in range(n_l):
                        cols.append(vm.col("X", i, j, t, l, sc))
                        coefs.append(et_sm[i, j, l])
            for j in range(n_j):
                for k in range(n_k):
                    for l in range(n_l):
                        cols.append(vm.col("Y", j, k, t, l, sc))
                        coefs.append(inst.emission_prod[j] + et_mw[j, k, l])
            for k in range(n_k):
                for m in range(n_m):
                    for l in range(n_l):
                        cols.append(vm.col("Z", k, m, t, l, sc))
                        coefs.append(et_wr[k, m, l])
        return cols, coefs

    if cap_mode == "per-scenario":
        for t in range(n_t):
            for sc in range(n_s):
                cols, coefs = emission_row(t, [sc])
                rows.add(cols, coefs, LE, inst.cap[t], "cap", (t + 1, sc + 1))
    else:
        for t in range(n_t):
            cols, coefs = emission_row(t, range(n_s))
            rows.add(cols, coefs, LE, inst.cap[t], "cap", (t + 1,))

    # (g) multiple sourcing: at least Sm supplier links per plant-period
    if cfg.multiple_sourcing:
        for j in range(n_j):
            for t in range(n_t):
                cols = [vm.col("XX", i, j, t, l) for i in range(n_i) for l in range(n_l)]
                rows.add(cols, [1.0] * len(cols), GE, float(inst.min_suppliers), "min_suppliers", (j + 1, t + 1))

    # (h) per-facility reduced capacity
    for j in range(n_j):
        for t in range(n_t):
            for sc in range(n_s):
                cols = [vm.col("Y", j, k, t, l, sc) for k in range(n_k) for l in range(n_l)]
                limit = inst.mfg_capacity[j] * (1.0 - scen.mfg_capacity_loss[j, sc])
                rows.add(cols, [1.0] * len(cols), LE, limit, "mfg_cap", (j + 1, t + 1, sc + 1))
    for k in range(n_k):
        for t in range(n_t):
            for sc in range(n_s):
                cols = [vm.col("Z", k, m, t, l, sc) for m in range(n_m) for l in range(n_l)]
                limit = inst.wh_capacity[k] * (1.0 - scen.wh_capacity_loss[k, sc])
                rows.add(cols, [1.0] * len(cols), LE, limit, "wh_cap", (k + 1, t + 1, sc + 1))

    # (i) temporary facilities must be opened before any incident link is used
    if cfg.temporary_facilities:
        for j in range(main_j, n_j):
            u = vm.col("U", j - main_j)
            for k in range(n_k):
                for t in range(n_t):
                    for l in range(n_l):
                        rows.add((vm.col("YY", j, k, t, l), u), (1.0, -1.0), LE, 0.0, "act_mfg", (j + 1, k + 1, t + 1, l + 1))
        for k in range(main_k, n_k):
            v = vm.col("V", k - main_k)
            for m in range(n_m):
                for t in range(n_t):
                    for l in range(n_l):
                        rows.add((vm.col("ZZ", k, m, t, l), v), (1.0, -1.0), LE, 0.0, "act_wh_out", (k + 1, m + 1, t + 1, l + 1))
            for j in range(n_j):
                for t in range(n_t):
                    for l in range(n_l):
                        rows.add((vm.col("YY", j, k, t, l), v), (1.0, -1.0), LE, 0.0, "act_wh_in", (j + 1, k + 1, t + 1, l + 1))

    a_matrix, relations, rhs = rows.build()

    # objective: cost vector (Z1)
    cost = np.zeros(vm.n_cols)
    d_sm, d_mw, d_wr = _delay_coeffs(inst, cfg, pr, delay_mode)
    # delay charges: tile the (o,d,l) coefficient over periods
    cost[vm.slice("XX")] = np.repeat(d_sm[:n_i, :n_j, None, :], n_t, axis=2).ravel()
    cost[vm.slice("YY")] = np.repeat(d_mw[:n_j, :n_k, None, :], n_t, axis=2).ravel()
    cost[vm.slice("ZZ")] = np.repeat(d_wr[:n_k, :n_m, None, :], n_t, axis=2).ravel()
    if n_tj:
        cost[vm.slice("U")] = inst.setup_temp_mfg[:n_tj]
    if n_tk:
        cost[vm.slice("V")] = inst.setup_temp_wh[:n_tk]
    # transport, probability weighted; delay/cost arrays are (o,d,l,s): tile over t
    cost[vm.slice("X")] = np.repeat(
        (inst.transport_cost_sm[:n_i, :n_j] * pr)[:, :, None, :, :], n_t, axis=2
    ).ravel()
    cost[vm.slice("Y")] = np.repeat(
        (inst.transport_cost_mw[:n_j, :n_k] * pr)[:, :, None, :, :], n_t, axis=2
    ).ravel()
    cost[vm.slice("Z")] = np.repeat(
        (inst.transport_cost_wr[:n_k, :n_m] * pr)[:, :, None, :, :], n_t, axis=2
    ).ravel()
    hold = inst.inv_cost[:n_j] * pr  # (j, s)
    shortc = inst.short_cost[:n_j] * pr
    cost[vm.slice("MI")] = np.repeat(hold[:, None, :], n_t, axis=1).ravel()
    cost[vm.slice("MS")] = np.repeat(shortc[:, None, :], n_t, axis=1).ravel()
    if cfg.safety_stock:
        cost[vm.slice("MSS")] = np.repeat(hold[:, None, :], n_t, axis=1).ravel()
    if cfg.stockpiling:
        cost[vm.slice("SP")] = np.repeat(
            np.broadcast_to(inst.stockpile_premium * pr, (n_j, n_s))[:, None, :], n_t, axis=1
        ).ravel()
    cost_const = (inst.info_setup + inst.info_training) if cfg.info_sharing else 0.0

    # objective: emission vector (Z2)
    emis = np.zeros(vm.n_cols)
    emis[vm.slice("X")] = np.repeat(
        (et_sm[:n_i, :n_j, :, None] * pr)[:, :, None, :, :], n_t, axis=2
    ).ravel()
    emis[vm.slice("Y")] = np.repeat(
        ((inst.emission_prod[:n_j, None, None] + et_mw[:n_j, :n_k])[:, :, :, None] * pr)[:, :, None, :, :],
        n_t, axis=2,
    ).ravel()
    emis[vm.slice("Z")] = np.repeat(
        (et_wr[:n_k, :n_m, :, None] * pr)[:, :, None, :, :], n_t, axis=2
    ).ravel()

    return MilpModel(
        var_map=vm,
        a_matrix=a_matrix,
        relations=relations,
        rhs=rhs,
        row_tags=rows.tags,
        objective_cost=cost,
        objective_emission=emis,
        objective_cost_const=float(cost_const),
        weights=(float(weights[0]), float(weights[1])),
        instance=inst,
        scenarios=scen,
        config=cfg,
        cap_mode=cap_mode,
        delay_mode=delay_mode,
        integrality=integrality,
    )


def evaluate_solution(model: MilpModel, point: np.ndarray) -> ObjectiveBreakdown:
    """Recompute the objective decomposition straight from instance data.

    Deliberately independent of the model's stored objective vectors, so it
    cross-checks the solver's reported objective.
    """
    x = np.asarray(point, dtype=float)
    if x.shape != (model.n_cols,):
        raise ValueError(f"point has shape {x.shape}, model expects ({model.n_cols},)")
    inst, scen, cfg = model.instance, model.scenarios, model.config
    vm = model.var_map
    pr = scen.probability
    n_s = inst.sets.n_scenarios

    xx = vm.values("XX", x)
    yy = vm.values("YY", x)
    zz = vm.values("ZZ", x)
    n_i, n_j = xx.shape[0], xx.shape[1]
    n_k, n_m = zz.shape[0], zz.shape[1]

    d_weights = pr if model.delay_mode == "expected" else np.ones_like(pr)
    delay_total = 0.0
    for sel, delay, saved, no, nd in (
        (xx, inst.transport_delay_sm, inst.saved_time_sm, n_i, n_j),
        (yy, inst.transport_delay_mw, inst.saved_time_mw, n_j, n_k),
        (zz, inst.transport_delay_wr, inst.saved_time_wr, n_k, n_m),
    ):
        eff = delay[:no, :nd] - (saved[:no, :nd, :, None] if cfg.info_sharing else 0.0)
        eff = np.maximum(eff, 0.0)
        per_link_mode = np.tensordot(eff, d_weights, axes=([3], [0]))  # (o,d,l)
        delay_total += inst.delay_cost * float(
            np.einsum("odtl,odl->", sel, per_link_mode)
        )

    xf = vm.values("X", x)
    yf = vm.values("Y", x)
    zf = vm.values("Z", x)
    transport = np.zeros(n_s)
    for flow, tc, no, nd in (
        (xf, inst.transport_cost_sm, n_i, n_j),
        (yf, inst.transport_cost_mw, n_j, n_k),
        (zf, inst.transport_cost_wr, n_k, n_m),
    ):
        transport += np.einsum("odtls,odls->s", flow, tc[:no, :nd])

    mi = vm.values("MI", x)
    ms = vm.values("MS", x)
    inventory = np.einsum("jts,js->s", mi, inst.inv_cost[:n_j])
    if cfg.safety_stock:
        inventory = inventory + np.einsum(
            "jts,js->s", vm.values("MSS", x), inst.inv_cost[:n_j]
        )
    if cfg.stockpiling:
        inventory = inventory + inst.stockpile_premium * vm.values("SP", x).sum(axis=(0, 1))
    shortage = np.einsum("jts,js->s", ms, inst.short_cost[:n_j])

    et_sm, et_mw, et_wr = _emission_coeffs(inst, cfg)
    emission = (
        np.einsum("odtls,odl->s", xf, et_sm[:n_i, :n_j])
        + np.einsum("odtls,od->s", yf, np.broadcast_to(inst.emission_prod[:n_j, None], (n_j, n_k)))
        + np.einsum("odtls,odl->s", yf, et_mw[:n_j, :n_k])
        + np.einsum("odtls,odl->s", zf, et_wr[:n_k, :n_m])
    )

    setup = 0.0
    if vm.has("U"):
        setup += float(vm.values("U", x) @ inst.setup_temp_mfg[: vm.family("U").size])
    if vm.has("V"):
        setup += float(vm.values("V", x) @ inst.setup_temp_wh[: vm.family("V").size])
    if cfg.info_sharing:
        setup += inst.info_setup + inst.info_training

    z1 = delay_total + setup + float(pr @ (transport + inventory + shortage))
    z2 = float(pr @ emission)
    w1, w2 = model.weights
    return ObjectiveBreakdown(
        delay_cost=delay_total,
        transport_cost=transport,
        inventory_cost=inventory,
        shortage_cost=shortage,
        emission=emission,
        setup_cost=setup,
        z1=z1,
        z2=z2,
        z_total=w1 * z1 + w2 * z2,
    )


def check_feasibility(model: MilpModel, point: np.ndarray, tol: float = 1e-6) -> list[Violation]:
    """Every row, bound, and integrality violation beyond tol, tagged."""
    x = np.asarray(point, dtype=float)
    if x.shape != (model.n_cols,):
        raise ValueError(f"point has shape {x.shape}, model expects ({model.n_cols},)")
    out: list[Violation] = []
    vm = model.var_map

    ax = model.a_matrix @ x
    resid = ax - model.rhs
    bad_le = (model.relations == LE) & (resid > tol)
    bad_ge = (model.relations == GE) & (resid < -tol)
    bad_eq = (model.relations == EQ) & (np.abs(resid) > tol)
    for r in np.flatnonzero(bad_le | bad_ge | bad_eq):
        family, index = model.row_tags[r]
        out.append(Violation("row", family, index, float(abs(resid[r]))))

    low = vm.lower - x
    high = x - vm.upper
    for c in np.flatnonzero((low > tol) | (high > tol)):
        family, index = vm.describe(int(c))
        out.append(Violation("bound", family, index, float(max(low[c], high[c]))))

    ints = vm.is_int
    frac = np.abs(x - np.round(x))
    for c in np.flatnonzero(ints & (frac > tol)):
        family, index = vm.describe(int(c))
        out.append(Violation("integrality", family, index, float(frac[c])))

    return out
