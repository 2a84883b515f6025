"""Problem instances: network sets, parameters, scenarios, strategy toggles.

All container types are immutable after construction (frozen dataclasses,
numpy arrays flagged read-only) and safe to share across workers.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields, replace

import numpy as np

__all__ = [
    "NetworkSets",
    "Instance",
    "ScenarioSet",
    "StrategyConfig",
    "ValidationIssue",
    "InstanceFormatError",
    "STRATEGY_NAMES",
    "validate_instance",
    "generate_instance",
    "paper_like_sets",
    "read_instance",
    "write_instance",
    "instance_to_dict",
    "instance_from_dict",
    "instance_digest",
    "scale_instance",
]

STRATEGY_NAMES = (
    "backup_suppliers",
    "multiple_sourcing",
    "safety_stock",
    "stockpiling",
    "temporary_facilities",
    "info_sharing",
)


@dataclass(frozen=True)
class NetworkSets:
    """Cardinalities of every index space in the network."""

    n_suppliers_main: int
    n_suppliers_backup: int
    n_manufacturers_main: int
    n_manufacturers_temp: int
    n_warehouses_main: int
    n_warehouses_temp: int
    n_retailers: int
    n_periods: int
    n_modes: int
    n_scenarios: int

    @property
    def n_suppliers(self) -> int:
        return self.n_suppliers_main + self.n_suppliers_backup

    @property
    def n_manufacturers(self) -> int:
        return self.n_manufacturers_main + self.n_manufacturers_temp

    @property
    def n_warehouses(self) -> int:
        return self.n_warehouses_main + self.n_warehouses_temp


def _freeze(arr: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(np.asarray(arr, dtype=float))
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Instance:
    """Deterministic parameter set over the full (main + standby) index space.

    Link arrays are indexed origin x destination x mode (x scenario for the
    scenario-dependent ones).  Suffixes name the echelon link: ``sm`` is
    supplier->manufacturer, ``mw`` manufacturer->warehouse, ``wr``
    warehouse->retailer.
    """

    sets: NetworkSets

    # money per unit moved, shape (origin, dest, mode, scenario)
    transport_cost_sm: np.ndarray
    transport_cost_mw: np.ndarray
    transport_cost_wr: np.ndarray

    # days per order, shape (origin, dest, mode, scenario)
    transport_delay_sm: np.ndarray
    transport_delay_mw: np.ndarray
    transport_delay_wr: np.ndarray

    delay_cost: float  # money per order per day

    # days saved per order by the information sharing system, (origin, dest, mode)
    saved_time_sm: np.ndarray
    saved_time_mw: np.ndarray
    saved_time_wr: np.ndarray

    setup_temp_mfg: np.ndarray  # money per temporary plant, shape (n_manufacturers_temp,)
    setup_temp_wh: np.ndarray  # money per temporary warehouse, shape (n_warehouses_temp,)
    info_setup: float
    info_training: float

    inv_cost: np.ndarray  # money/unit/period, shape (n_manufacturers, n_scenarios)
    short_cost: np.ndarray  # money/unit/period, shape (n_manufacturers, n_scenarios)

    mfg_capacity: np.ndarray  # units/period, shape (n_manufacturers,)
    wh_capacity: np.ndarray  # units/period, shape (n_warehouses,)

    stockpile_premium: float  # money per stockpiled unit
    min_suppliers: int

    emission_prod: np.ndarray  # kgCO2/unit, shape (n_manufacturers,)
    emission_transport_sm: np.ndarray  # kgCO2/unit, shape (origin, dest, mode)
    emission_transport_mw: np.ndarray
    emission_transport_wr: np.ndarray
    emission_saving: float  # kgCO2/unit shipped saved by information sharing

    cap: np.ndarray  # kgCO2 allowed per period, shape (n_periods,)
    big_m: float

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, np.ndarray):
                object.__setattr__(self, f.name, _freeze(v))


@dataclass(frozen=True)
class ScenarioSet:
    """Per-scenario stochastic data."""

    probability: np.ndarray  # shape (n_scenarios,)
    demand: np.ndarray  # units, shape (n_retailers, n_periods, n_scenarios)
    mfg_capacity_loss: np.ndarray  # fraction in [0,1], shape (n_manufacturers, n_scenarios)
    wh_capacity_loss: np.ndarray  # fraction in [0,1], shape (n_warehouses, n_scenarios)

    def __post_init__(self):
        for f in fields(self):
            object.__setattr__(self, f.name, _freeze(getattr(self, f.name)))


@dataclass(frozen=True)
class StrategyConfig:
    """Independent toggles for the six resilience strategies."""

    backup_suppliers: bool = False
    multiple_sourcing: bool = False
    safety_stock: bool = False
    stockpiling: bool = False
    temporary_facilities: bool = False
    info_sharing: bool = False

    def enabled(self) -> tuple[str, ...]:
        return tuple(n for n in STRATEGY_NAMES if getattr(self, n))

    def with_flags(self, **flags: bool) -> "StrategyConfig":
        unknown = set(flags) - set(STRATEGY_NAMES)
        if unknown:
            raise ValueError(f"unknown strategy flags: {sorted(unknown)}")
        return replace(self, **flags)


@dataclass(frozen=True)
class ValidationIssue:
    code: str
    message: str

    def __str__(self) -> str:
        return f"[{self.code}] {self.message}"


class InstanceFormatError(ValueError):
    """Raised on malformed instance files; carries field-level diagnostics."""


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

_LINK_SHAPES = {
    "transport_cost_sm": ("n_suppliers", "n_manufacturers", "n_modes", "n_scenarios"),
    "transport_cost_mw": ("n_manufacturers", "n_warehouses", "n_modes", "n_scenarios"),
    "transport_cost_wr": ("n_warehouses", "n_retailers", "n_modes", "n_scenarios"),
    "transport_delay_sm": ("n_suppliers", "n_manufacturers", "n_modes", "n_scenarios"),
    "transport_delay_mw": ("n_manufacturers", "n_warehouses", "n_modes", "n_scenarios"),
    "transport_delay_wr": ("n_warehouses", "n_retailers", "n_modes", "n_scenarios"),
    "saved_time_sm": ("n_suppliers", "n_manufacturers", "n_modes"),
    "saved_time_mw": ("n_manufacturers", "n_warehouses", "n_modes"),
    "saved_time_wr": ("n_warehouses", "n_retailers", "n_modes"),
    "setup_temp_mfg": ("n_manufacturers_temp",),
    "setup_temp_wh": ("n_warehouses_temp",),
    "inv_cost": ("n_manufacturers", "n_scenarios"),
    "short_cost": ("n_manufacturers", "n_scenarios"),
    "mfg_capacity": ("n_manufacturers",),
    "wh_capacity": ("n_warehouses",),
    "emission_prod": ("n_manufacturers",),
    "emission_transport_sm": ("n_suppliers", "n_manufacturers", "n_modes"),
    "emission_transport_mw": ("n_manufacturers", "n_warehouses", "n_modes"),
    "emission_transport_wr": ("n_warehouses", "n_retailers", "n_modes"),
    "cap": ("n_periods",),
}

_SCENARIO_SHAPES = {
    "probability": ("n_scenarios",),
    "demand": ("n_retailers", "n_periods", "n_scenarios"),
    "mfg_capacity_loss": ("n_manufacturers", "n_scenarios"),
    "wh_capacity_loss": ("n_warehouses", "n_scenarios"),
}

_NONNEG_SCALARS = (
    "delay_cost",
    "info_setup",
    "info_training",
    "stockpile_premium",
    "emission_saving",
)


def validate_instance(inst: Instance, scen: ScenarioSet) -> list[ValidationIssue]:
    """Check every structural invariant; returns the (possibly empty) violation list.

    Violations are data, not exceptions: callers decide whether to abort.
    """
    issues: list[ValidationIssue] = []
    s = inst.sets

    for name, lo in (
        ("n_suppliers_main", 1),
        ("n_manufacturers_main", 1),
        ("n_warehouses_main", 1),
        ("n_retailers", 1),
        ("n_periods", 1),
        ("n_modes", 1),
        ("n_scenarios", 1),
        ("n_suppliers_backup", 0),
        ("n_manufacturers_temp", 0),
        ("n_warehouses_temp", 0),
    ):
        if getattr(s, name) < lo:
            issues.append(ValidationIssue("sets-count", f"sets.{name} must be >= {lo}"))
    if issues:
        # shape checks against broken counts would only cascade
        return issues

    def expect(owner, name, dims):
        arr = getattr(owner, name)
        want = tuple(getattr(s, d) for d in dims)
        if arr.shape != want:
            issues.append(
                ValidationIssue("shape", f"{name}: shape {arr.shape} != expected {want}")
            )
            return None
        return arr

    for name, dims in _LINK_SHAPES.items():
        arr = expect(inst, name, dims)
        if arr is not None and np.any(arr < 0):
            issues.append(ValidationIssue("negative-value", f"{name} has negative entries"))

    for name in _NONNEG_SCALARS:
        if getattr(inst, name) < 0:
            issues.append(ValidationIssue("negative-value", f"{name} must be >= 0"))
    if inst.min_suppliers < 0:
        issues.append(ValidationIssue("negative-value", "min_suppliers must be >= 0"))

    for name, dims in _SCENARIO_SHAPES.items():
        expect(scen, name, dims)

    if scen.probability.shape == (s.n_scenarios,):
        if np.any(scen.probability < 0):
            issues.append(ValidationIssue("probability-negative", "scenario probabilities must be >= 0"))
        total = float(scen.probability.sum())
        if abs(total - 1.0) > 1e-12:
            issues.append(
                ValidationIssue("probability-sum", f"scenario probabilities sum to {total!r}, not 1")
            )
    if scen.demand.ndim == 3 and np.any(scen.demand < 0):
        issues.append(ValidationIssue("demand-negative", "demand has negative entries"))
    for name in ("mfg_capacity_loss", "wh_capacity_loss"):
        arr = getattr(scen, name)
        if np.any(arr < 0) or np.any(arr > 1):
            issues.append(
                ValidationIssue("capacity-loss-range", f"{name} entries must lie in [0, 1]")
            )

    if scen.demand.shape == (s.n_retailers, s.n_periods, s.n_scenarios):
        # big_m must dominate every retailer's cumulative demand through any period
        cum = np.cumsum(scen.demand, axis=1)
        need = float(cum.max()) if cum.size else 0.0
        if inst.big_m < need:
            issues.append(
                ValidationIssue(
                    "big-m-bound",
                    f"big_m={inst.big_m!r} is below the max cumulative demand {need!r}",
                )
            )
    if inst.big_m <= 0:
        issues.append(ValidationIssue("big-m-bound", "big_m must be positive"))

    return issues


# ---------------------------------------------------------------------------
# seeded generator
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Profile:
    demand_lo: float
    demand_hi: float
    demand_rise: float  # worst-scenario demand multiplier is 1 + demand_rise
    cost_rise: float
    delay_rise_days: float
    loss_mfg_max: tuple[float, float]  # uniform range of worst-case loss per plant
    loss_wh_max: tuple[float, float]
    holding_rise: float
    capacity_slack: float  # capacity over worst-case peak period demand
    cap_slack: float  # emission cap over mean-coefficient nominal emissions
    cap_decay: float  # per-period relative decrease of the cap


_PROFILES = {
    # mirrors the numerical experiment scale: thousands of units per
    # retailer-period, disruption ladder from none to strong
    "paper-like": _Profile(
        demand_lo=900.0,
        demand_hi=1400.0,
        demand_rise=0.25,
        cost_rise=0.5,
        delay_rise_days=3.0,
        loss_mfg_max=(0.20, 0.35),
        loss_wh_max=(0.10, 0.22),
        holding_rise=0.3,
        capacity_slack=1.8,
        cap_slack=1.6,
        cap_decay=0.03,
    ),
    "mild": _Profile(
        demand_lo=900.0,
        demand_hi=1400.0,
        demand_rise=0.10,
        cost_rise=0.2,
        delay_rise_days=1.0,
        loss_mfg_max=(0.05, 0.15),
        loss_wh_max=(0.03, 0.10),
        holding_rise=0.1,
        capacity_slack=2.0,
        cap_slack=2.0,
        cap_decay=0.02,
    ),
    # integer-friendly miniature scale for enumeration tests
    "toy": _Profile(
        demand_lo=1.0,
        demand_hi=3.0,
        demand_rise=0.5,
        cost_rise=0.4,
        delay_rise_days=2.0,
        loss_mfg_max=(0.2, 0.4),
        loss_wh_max=(0.1, 0.3),
        holding_rise=0.3,
        capacity_slack=2.5,
        cap_slack=2.5,
        cap_decay=0.02,
    ),
}


def paper_like_sets() -> NetworkSets:
    """Index-set sizes of the reference test problem (4 disruption scenarios,
    3 backup suppliers, 3 temporary plants and warehouses, 2 transport modes)."""
    return NetworkSets(
        n_suppliers_main=5,
        n_suppliers_backup=3,
        n_manufacturers_main=3,
        n_manufacturers_temp=3,
        n_warehouses_main=5,
        n_warehouses_temp=3,
        n_retailers=7,
        n_periods=6,
        n_modes=2,
        n_scenarios=4,
    )


def generate_instance(
    seed: int, sets: NetworkSets, disruption_profile: str = "paper-like"
) -> tuple[Instance, ScenarioSet]:
    """Deterministically synthesize an instance and its scenario set.

    Scenario 1 is always the undisrupted baseline; later scenarios apply
    monotonically increasing disruption multipliers (demand, delays,
    transport/holding costs up, capacities down).  The emission cap shrinks
    over periods.  Pure function of (seed, sets, profile).
    """
    try:
        prof = _PROFILES[disruption_profile]
    except KeyError:
        raise ValueError(
            f"unknown disruption profile {disruption_profile!r}; "
            f"known: {sorted(_PROFILES)}"
        ) from None

    rng = np.random.default_rng(seed)
    ns, nm, nw = sets.n_suppliers, sets.n_manufacturers, sets.n_warehouses
    nr, nt, nl, nsc = sets.n_retailers, sets.n_periods, sets.n_modes, sets.n_scenarios
    main_i, main_j, main_k = (
        sets.n_suppliers_main,
        sets.n_manufacturers_main,
        sets.n_warehouses_main,
    )

    # severity ladder: 0 for the baseline, rising to 1 for the worst scenario
    if nsc > 1:
        sev = np.arange(nsc) / (nsc - 1)
    else:
        sev = np.zeros(1)

    # demand: integral units, common base per retailer with mild period wiggle
    base = rng.uniform(prof.demand_lo, prof.demand_hi, nr)
    wiggle = rng.uniform(0.92, 1.08, (nr, nt))
    nominal = np.round(base[:, None] * wiggle)
    nominal = np.maximum(nominal, 1.0)
    demand = np.round(nominal[:, :, None] * (1.0 + prof.demand_rise * sev)[None, None, :])

    mode_cost = 1.0 + 0.25 * np.arange(nl)
    mode_delay = 1.0 / (1.0 + 0.8 * np.arange(nl))  # faster modes cost more
    mode_emis = 1.0 + 0.4 * np.arange(nl)

    def link_costs(base_lo, base_hi, n_o, n_d):
        b = rng.uniform(base_lo, base_hi, (n_o, n_d))
        return b[:, :, None] * mode_cost[None, None, :]

    # supplier->manufacturer: backups charge a premium but barely react to
    # disruption, which is what makes them worth reserving
    tc_sm_base = link_costs(2.0, 5.0, ns, nm)
    tc_sm_base[main_i:] *= 1.35
    rise_sm = np.empty((ns, nsc))
    rise_sm[:main_i] = 1.0 + prof.cost_rise * sev
    rise_sm[main_i:] = 1.0 + 0.06 * sev
    transport_cost_sm = tc_sm_base[:, :, :, None] * rise_sm[:, None, None, :]

    mw_rise = 1.0 + 0.4 * prof.cost_rise * sev
    transport_cost_mw = link_costs(1.5, 4.0, nm, nw)[:, :, :, None] * mw_rise
    transport_cost_wr = link_costs(1.5, 4.0, nw, nr)[:, :, :, None] * mw_rise

    def link_delays(n_o, n_d, rise_per_origin):
        b = rng.uniform(1.0, 4.0, (n_o, n_d))
        b = b[:, :, None] * mode_delay[None, None, :]
        return b[:, :, :, None] + rise_per_origin[:, None, None, :]

    delay_rise_sm = np.empty((ns, nsc))
    delay_rise_sm[:main_i] = prof.delay_rise_days * sev
    delay_rise_sm[main_i:] = 0.3 * sev
    transport_delay_sm = link_delays(ns, nm, delay_rise_sm)
    downstream_rise = np.broadcast_to(0.5 * prof.delay_rise_days * sev, (nm, nsc))
    transport_delay_mw = link_delays(nm, nw, np.ascontiguousarray(downstream_rise))
    downstream_rise_w = np.broadcast_to(0.5 * prof.delay_rise_days * sev, (nw, nsc))
    transport_delay_wr = link_delays(nw, nr, np.ascontiguousarray(downstream_rise_w))

    saved_time_sm = rng.uniform(0.2, 0.9, (ns, nm, nl))
    saved_time_mw = rng.uniform(0.2, 0.9, (nm, nw, nl))
    saved_time_wr = rng.uniform(0.2, 0.9, (nw, nr, nl))

    scen_rise = 1.0 + prof.holding_rise * sev
    inv_cost = rng.uniform(0.8, 1.6, nm)[:, None] * scen_rise[None, :]
    short_cost = rng.uniform(12.0, 20.0, nm)[:, None] * scen_rise[None, :]

    # capacities sized against the worst-scenario peak period; temporary
    # facilities are identical to each other by assumption
    peak = float(demand.sum(axis=0).max())
    mfg_capacity = np.empty(nm)
    mfg_capacity[:main_j] = np.round(
        peak * prof.capacity_slack / main_j * rng.uniform(0.9, 1.15, main_j)
    )
    if nm > main_j:
        mfg_capacity[main_j:] = np.round(0.5 * mfg_capacity[:main_j].mean())
    wh_capacity = np.empty(nw)
    wh_capacity[:main_k] = np.round(
        peak * prof.capacity_slack / main_k * rng.uniform(0.9, 1.15, main_k)
    )
    if nw > main_k:
        wh_capacity[main_k:] = np.round(0.5 * wh_capacity[:main_k].mean())

    # capacity losses grow with severity; temporary facilities are immune
    loss_mfg = np.zeros((nm, nsc))
    loss_mfg[:main_j] = rng.uniform(*prof.loss_mfg_max, main_j)[:, None] * sev[None, :]
    loss_wh = np.zeros((nw, nsc))
    loss_wh[:main_k] = rng.uniform(*prof.loss_wh_max, main_k)[:, None] * sev[None, :]

    emission_prod = rng.uniform(5.0, 8.0, nm)
    emission_transport_sm = rng.uniform(0.3, 0.9, (ns, nm))[:, :, None] * mode_emis
    emission_transport_mw = rng.uniform(0.3, 0.9, (nm, nw))[:, :, None] * mode_emis
    emission_transport_wr = rng.uniform(0.3, 0.9, (nw, nr))[:, :, None] * mode_emis
    emission_saving = float(rng.uniform(0.02, 0.06))

    # cap: generous at multiplier 1 for every scenario, then shrinking with t
    per_unit = (
        emission_prod.mean()
        + emission_transport_sm.mean()
        + emission_transport_mw.mean()
        + emission_transport_wr.mean()
    )
    worst_per_period = demand.sum(axis=0).max(axis=1)  # shape (nt,)
    decay = 1.0 - prof.cap_decay * np.arange(nt)
    cap = prof.cap_slack * per_unit * worst_per_period * decay

    delay_cost = float(rng.uniform(30.0, 60.0))
    info_setup = float(rng.uniform(9000.0, 15000.0))
    info_training = float(rng.uniform(4000.0, 8000.0))
    setup_temp_mfg = rng.uniform(20000.0, 30000.0, sets.n_manufacturers_temp)
    setup_temp_wh = rng.uniform(12000.0, 18000.0, sets.n_warehouses_temp)
    stockpile_premium = float(rng.uniform(8.0, 12.0))

    if disruption_profile == "toy":
        # keep fixed charges on the same scale as the tiny flows
        info_setup, info_training = float(rng.uniform(2.0, 5.0)), float(rng.uniform(1.0, 3.0))
        setup_temp_mfg = rng.uniform(3.0, 6.0, sets.n_manufacturers_temp)
        setup_temp_wh = rng.uniform(2.0, 4.0, sets.n_warehouses_temp)
        delay_cost = float(rng.uniform(0.5, 2.0))

    raw_pr = np.sort(rng.uniform(0.5, 1.5, nsc))[::-1]
    probability = raw_pr / raw_pr.sum()
    probability[0] = 1.0 - probability[1:].sum()  # exact unit sum

    big_m = float(math.ceil(demand.sum(axis=(0, 1)).max()))

    inst = Instance(
        sets=sets,
        transport_cost_sm=transport_cost_sm,
        transport_cost_mw=transport_cost_mw,
        transport_cost_wr=transport_cost_wr,
        transport_delay_sm=transport_delay_sm,
        transport_delay_mw=transport_delay_mw,
        transport_delay_wr=transport_delay_wr,
        delay_cost=delay_cost,
        saved_time_sm=saved_time_sm,
        saved_time_mw=saved_time_mw,
        saved_time_wr=saved_time_wr,
        setup_temp_mfg=setup_temp_mfg,
        setup_temp_wh=setup_temp_wh,
        info_setup=info_setup,
        info_training=info_training,
        inv_cost=inv_cost,
        short_cost=short_cost,
        mfg_capacity=mfg_capacity,
        wh_capacity=wh_capacity,
        stockpile_premium=stockpile_premium,
        min_suppliers=2,
        emission_prod=emission_prod,
        emission_transport_sm=emission_transport_sm,
        emission_transport_mw=emission_transport_mw,
        emission_transport_wr=emission_transport_wr,
        emission_saving=emission_saving,
        cap=cap,
        big_m=big_m,
    )
    scen = ScenarioSet(
        probability=probability,
        demand=demand,
        mfg_capacity_loss=loss_mfg,
        wh_capacity_loss=loss_wh,
    )
    return inst, scen


def scale_instance(
    inst: Instance,
    scen: ScenarioSet,
    *,
    cap_fraction: float = 1.0,
    demand_fraction: float = 1.0,
    capacity_fraction: float = 1.0,
) -> tuple[Instance, ScenarioSet]:
    """Return copies with the given multipliers applied.

    Demand growth beyond 1 also scales big_m so the linking bound stays valid.
    """
    new_inst = inst
    if cap_fraction != 1.0:
        new_inst = replace(new_inst, cap=inst.cap * cap_fraction)
    if capacity_fraction != 1.0:
        new_inst = replace(
            new_inst,
            mfg_capacity=inst.mfg_capacity * capacity_fraction,
            wh_capacity=inst.wh_capacity * capacity_fraction,
        )
    if demand_fraction != 1.0 and demand_fraction > 1.0:
        new_inst = replace(new_inst, big_m=inst.big_m * demand_fraction)
    new_scen = scen
    if demand_fraction != 1.0:
        new_scen = replace(scen, demand=scen.demand * demand_fraction)
    return new_inst, new_scen


# ---------------------------------------------------------------------------
# file format (structured JSON; grammar documented in docs/instance-format.md)
# ---------------------------------------------------------------------------

_FORMAT_TAG = "scnd-instance-v1"

_SET_KEYS = (
    "n_suppliers_main",
    "n_suppliers_backup",
    "n_manufacturers_main",
    "n_manufacturers_temp",
    "n_warehouses_main",
    "n_warehouses_temp",
    "n_retailers",
    "n_periods",
    "n_modes",
    "n_scenarios",
)

_PARAM_ARRAY_KEYS = tuple(_LINK_SHAPES)
_PARAM_SCALAR_KEYS = (
    "delay_cost",
    "info_setup",
    "info_training",
    "stockpile_premium",
    "min_suppliers",
    "emission_saving",
    "big_m",
)
_SCENARIO_KEYS = tuple(_SCENARIO_SHAPES)


def instance_to_dict(inst: Instance, scen: ScenarioSet, cfg: StrategyConfig) -> dict:
    params: dict = {}
    for key in _PARAM_ARRAY_KEYS:
        params[key] = getattr(inst, key).tolist()
    for key in _PARAM_SCALAR_KEYS:
        v = getattr(inst, key)
        params[key] = int(v) if key == "min_suppliers" else float(v)
    return {
        "format": _FORMAT_TAG,
        "sets": {k: getattr(inst.sets, k) for k in _SET_KEYS},
        "parameters": params,
        "scenarios": {k: getattr(scen, k).tolist() for k in _SCENARIO_KEYS},
        "strategies": {k: bool(getattr(cfg, k)) for k in STRATEGY_NAMES},
    }


def _require_mapping(obj, where: str) -> dict:
    if not isinstance(obj, dict):
        raise InstanceFormatError(f"{where}: expected an object")
    return obj


def _take_keys(section: dict, required, where: str, optional=()) -> None:
    missing = [k for k in required if k not in section]
    if missing:
        raise InstanceFormatError(f"{where}: missing required field(s): {', '.join(missing)}")
    unknown = [k for k in section if k not in required and k not in optional]
    if unknown:
        raise InstanceFormatError(f"{where}: unknown field(s): {', '.join(sorted(unknown))}")


def _array_field(section: dict, key: str, where: str) -> np.ndarray:
    try:
        arr = np.asarray(section[key], dtype=float)
    except (TypeError, ValueError) as exc:
        raise InstanceFormatError(f"{where}.{key}: not a numeric array ({exc})") from None
    return arr


def instance_from_dict(data: dict) -> tuple[Instance, ScenarioSet, StrategyConfig]:
    data = _require_mapping(data, "top level")
    _take_keys(
        data,
        required=("sets", "parameters", "scenarios", "strategies"),
        optional=("format",),
        where="top level",
    )
    if "format" in data and data["format"] != _FORMAT_TAG:
        raise InstanceFormatError(f"top level.format: unsupported value {data['format']!r}")

    sets_sec = _require_mapping(data["sets"], "sets")
    _take_keys(sets_sec, _SET_KEYS, "sets")
    try:
        sets = NetworkSets(**{k: int(sets_sec[k]) for k in _SET_KEYS})
    except (TypeError, ValueError) as exc:
        raise InstanceFormatError(f"sets: {exc}") from None

    params = _require_mapping(data["parameters"], "parameters")
    _take_keys(params, _PARAM_ARRAY_KEYS + _PARAM_SCALAR_KEYS, "parameters")
    kwargs = {k: _array_field(params, k, "parameters") for k in _PARAM_ARRAY_KEYS}
    for k in _PARAM_SCALAR_KEYS:
        v = params[k]
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            raise InstanceFormatError(f"parameters.{k}: expected a number")
        kwargs[k] = int(v) if k == "min_suppliers" else float(v)

    scen_sec = _require_mapping(data["scenarios"], "scenarios")
    _take_keys(scen_sec, _SCENARIO_KEYS, "scenarios")
    scen = ScenarioSet(**{k: _array_field(scen_sec, k, "scenarios") for k in _SCENARIO_KEYS})

    strat_sec = _require_mapping(data["strategies"], "strategies")
    _take_keys(strat_sec, STRATEGY_NAMES, "strategies")
    for k in STRATEGY_NAMES:
        if not isinstance(strat_sec[k], bool):
            raise InstanceFormatError(f"strategies.{k}: expected true/false")
    cfg = StrategyConfig(**{k: strat_sec[k] for k in STRATEGY_NAMES})

    inst = Instance(sets=sets, **kwargs)
    return inst, scen, cfg


def write_instance(path, inst: Instance, scen: ScenarioSet, cfg: StrategyConfig) -> None:
    text = json.dumps(instance_to_dict(inst, scen, cfg), indent=1, sort_keys=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text + "\n")


def read_instance(path) -> tuple[Instance, ScenarioSet, StrategyConfig]:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InstanceFormatError(f"{path}: line {exc.lineno}, col {exc.colno}: {exc.msg}") from None
    return instance_from_dict(data)


def instance_digest(inst: Instance, scen: ScenarioSet, cfg: StrategyConfig) -> str:
    """Stable sha256 over the canonical file form; used in provenance headers."""
    import hashlib

    text = json.dumps(instance_to_dict(inst, scen, cfg), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()
