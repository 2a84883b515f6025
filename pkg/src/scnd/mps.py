"""Fixed-format MPS export and import.

Row and column names are deterministic functions of the model's tags: a
short family code followed by the zero-padded ordinal of the row/column
inside its family (docs/mps-format.md lists the codes).  Integer columns
are wrapped in INTORG/INTEND marker pairs; every integer or finite upper
bound is written explicitly so no parser-default ambiguity remains.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

__all__ = ["RawMilp", "export_standard", "read_standard", "write_standard_arrays", "model_names"]

_ROW_CODE = {
    "link_sm": "L1",
    "link_mw": "L2",
    "link_wr": "L3",
    "mode_sm": "M1",
    "mode_mw": "M2",
    "mode_wr": "M3",
    "balance": "B",
    "wh_flow": "W",
    "demand": "D",
    "cap": "C",
    "min_suppliers": "S",
    "mfg_cap": "P",
    "wh_cap": "Q",
    "act_mfg": "A1",
    "act_wh_out": "A2",
    "act_wh_in": "A3",
}


@dataclass
class RawMilp:
    """Plain-array MILP as read back from an MPS file."""

    name: str
    objective: np.ndarray
    objective_const: float
    a_matrix: sp.csr_matrix
    relations: np.ndarray
    rhs: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    is_int: np.ndarray
    row_names: list[str]
    col_names: list[str]


def model_names(model) -> tuple[list[str], list[str]]:
    """Deterministic MPS names for every row and column of a MilpModel."""
    counters: dict[str, int] = {}
    row_names = []
    for family, _ in model.row_tags:
        code = _ROW_CODE[family]
        seq = counters.get(family, 0) + 1
        counters[family] = seq
        row_names.append(f"{code}{seq:0{8 - len(code)}d}")
    col_names = []
    vm = model.var_map
    for fam_name in vm.families:
        fam = vm.family(fam_name)
        for ordinal in range(fam.size):
            col_names.append(f"{fam_name}{ordinal + 1:0{8 - len(fam_name)}d}")
    return row_names, col_names


def export_standard(model, path) -> None:
    """Write the model (combined weighted objective) as fixed-format MPS."""
    row_names, col_names = model_names(model)
    vm = model.var_map
    write_standard_arrays(
        path,
        "SCND",
        model.combined_objective(),
        model.combined_constant(),
        model.a_matrix,
        model.relations,
        model.rhs,
        vm.lower,
        vm.upper,
        vm.is_int,
        row_names,
        col_names,
    )


def _num(v: float) -> str:
    return f"{v:.12g}"


def write_standard_arrays(
    path, name, objective, objective_const, a_matrix, relations, rhs,
    lower, upper, is_int, row_names, col_names,
) -> None:
    a_csc = sp.csc_matrix(a_matrix)
    m, n = a_csc.shape
    lines = [f"NAME          {name}", "ROWS", " N  OBJ"]
    for rel, rn in zip(relations, row_names):
        lines.append(f" {rel}  {rn}")

    lines.append("COLUMNS")
    marker_count = 0
    in_int = False

    def marker(kind):
        nonlocal marker_count
        marker_count += 1
        lines.append(f"    MK{marker_count:06d}  'MARKER'                 '{kind}'")

    for j in range(n):
        if bool(is_int[j]) != in_int:
            marker("INTORG" if not in_int else "INTEND")
            in_int = bool(is_int[j])
        cn = col_names[j]
        wrote = False
        if objective[j] != 0.0:
            lines.append(f"    {cn:<8}  {'OBJ':<8}  {_num(objective[j])}")
            wrote = True
        seg = slice(a_csc.indptr[j], a_csc.indptr[j + 1])
        for r, v in zip(a_csc.indices[seg], a_csc.data[seg]):
            lines.append(f"    {cn:<8}  {row_names[r]:<8}  {_num(v)}")
            wrote = True
        if not wrote:
            lines.append(f"    {cn:<8}  {'OBJ':<8}  0")
    if in_int:
        marker("INTEND")

    lines.append("RHS")
    if objective_const != 0.0:
        lines.append(f"    {'RHS':<8}  {'OBJ':<8}  {_num(-objective_const)}")
    for r in range(m):
        if rhs[r] != 0.0:
            lines.append(f"    {'RHS':<8}  {row_names[r]:<8}  {_num(rhs[r])}")

    lines.append("RANGES")
    lines.append("BOUNDS")
    for j in range(n):
        cn = col_names[j]
        lo, hi = lower[j], upper[j]
        if np.isfinite(lo) and lo == hi:
            lines.append(f" FX {'BND':<8}  {cn:<8}  {_num(lo)}")
            continue
        if not np.isfinite(lo):
            lines.append(f" MI {'BND':<8}  {cn:<8}")
        elif lo != 0.0:
            lines.append(f" LO {'BND':<8}  {cn:<8}  {_num(lo)}")
        if np.isfinite(hi):
            lines.append(f" UP {'BND':<8}  {cn:<8}  {_num(hi)}")
    lines.append("ENDATA")

    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def read_standard(path) -> RawMilp:
    """Parse an MPS file (the dialect written here, plus common variants)."""
    name = ""
    section = None
    obj_row = None
    row_rel: dict[str, str] = {}
    row_ids: dict[str, int] = {}
    row_order: list[str] = []
    col_order: list[str] = []
    col_ids: dict[str, int] = {}
    entries: list[tuple[int, int, float]] = []  # (row, col, coef)
    obj_entries: dict[int, float] = {}
    rhs_vals: dict[str, float] = {}
    ranges_vals: dict[str, float] = {}
    obj_const = 0.0
    lo_over: dict[int, float] = {}
    hi_over: dict[int, float] = {}
    int_flags: set[int] = set()
    in_int = False

    def col_id(cn: str) -> int:
        if cn not in col_ids:
            col_ids[cn] = len(col_order)
            col_order.append(cn)
        return col_ids[cn]

    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("*"):
                continue
            head = line[:1].strip()
            if head:  # section header
                parts = line.split()
                section = parts[0].upper()
                if section == "NAME":
                    name = parts[1] if len(parts) > 1 else ""
                elif section == "ENDATA":
                    break
                continue
            parts = line.split()
            if section == "ROWS":
                rel, rn = parts[0].upper(), parts[1]
                if rel == "N":
                    if obj_row is None:
                        obj_row = rn
                    continue
                if rel not in ("L", "E", "G"):
                    raise ValueError(f"{path}:{lineno}: unknown row sense {rel!r}")
                row_rel[rn] = rel
                row_ids[rn] = len(row_order)
                row_order.append(rn)
            elif section == "COLUMNS":
                if len(parts) >= 3 and parts[1].strip("'") == "MARKER":
                    kind = parts[-1].strip("'").upper()
                    in_int = kind == "INTORG"
                    continue
                cn = parts[0]
                j = col_id(cn)
                if in_int:
                    int_flags.add(j)
                for rn, val in zip(parts[1::2], parts[2::2]):
                    v = float(val)
                    if rn == obj_row:
                        obj_entries[j] = obj_entries.get(j, 0.0) + v
                    else:
                        if rn not in row_ids:
                            raise ValueError(f"{path}:{lineno}: unknown row {rn!r}")
                        entries.append((row_ids[rn], j, v))
            elif section == "RHS":
                for rn, val in zip(parts[1::2], parts[2::2]):
                    if rn == obj_row:
                        obj_const = -float(val)
                    else:
                        rhs_vals[rn] = float(val)
            elif section == "RANGES":
                for rn, val in zip(parts[1::2], parts[2::2]):
                    ranges_vals[rn] = float(val)
            elif section == "BOUNDS":
                btype = parts[0].upper()
                cn = parts[2]
                j = col_id(cn)
                val = float(parts[3]) if len(parts) > 3 else 0.0
                if btype == "UP":
                    hi_over[j] = val
                elif btype == "LO":
                    lo_over[j] = val
                elif btype == "FX":
                    lo_over[j] = val
                    hi_over[j] = val
                elif btype == "FR":
                    lo_over[j] = -np.inf
                    hi_over[j] = np.inf
                elif btype == "MI":
                    lo_over[j] = -np.inf
                elif btype == "PL":
                    hi_over[j] = np.inf
                elif btype == "BV":
                    lo_over[j] = 0.0
                    hi_over[j] = 1.0
                    int_flags.add(j)
                else:
                    raise ValueError(f"{path}:{lineno}: unsupported bound type {btype!r}")
            elif section is None:
                raise ValueError(f"{path}:{lineno}: data before any section header")

    n, m = len(col_order), len(row_order)
    a = sp.csr_matrix(
        (
            [e[2] for e in entries],
            ([e[0] for e in entries], [e[1] for e in entries]),
        ),
        shape=(m, n),
    )
    relations = np.asarray([row_rel[rn] for rn in row_order], dtype="<U1")
    rhs = np.asarray([rhs_vals.get(rn, 0.0) for rn in row_order])
    c = np.zeros(n)
    for j, v in obj_entries.items():
        c[j] = v
    lower = np.zeros(n)
    upper = np.full(n, np.inf)
    for j, v in lo_over.items():
        lower[j] = v
    for j, v in hi_over.items():
        upper[j] = v
    is_int = np.zeros(n, dtype=bool)
    for j in int_flags:
        is_int[j] = True

    if ranges_vals:
        # split every ranged row into its two one-sided rows
        extra = []
        extra_rel, extra_rhs, extra_names = [], [], []
        for rn, rng in ranges_vals.items():
            r = row_ids[rn]
            rel = relations[r]
            extra.append(a.getrow(r))
            extra_names.append(rn + "__R")
            if rel == "L":
                extra_rel.append("G")
                extra_rhs.append(rhs[r] - abs(rng))
            elif rel == "G":
                extra_rel.append("L")
                extra_rhs.append(rhs[r] + abs(rng))
            else:
                relations[r] = "G"
                extra_rel.append("L")
                extra_rhs.append(rhs[r] + (rng if rng >= 0 else 0.0))
                rhs[r] = rhs[r] + (rng if rng < 0 else 0.0)
        a = sp.vstack([a] + extra, format="csr")
        relations = np.concatenate([relations, np.asarray(extra_rel, dtype="<U1")])
        rhs = np.concatenate([rhs, np.asarray(extra_rhs)])
        row_order = row_order + extra_names

    return RawMilp(
        name=name,
        objective=c,
        objective_const=obj_const,
        a_matrix=a,
        relations=relations,
        rhs=rhs,
        lower=lower,
        upper=upper,
        is_int=is_int,
        row_names=row_order,
        col_names=col_order,
    )
