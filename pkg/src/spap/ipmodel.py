"""Integer programming formulation of MAX-SPA-P.

Variables
    ``x_i_j``   binary, one per acceptable pair
    ``alpha_j`` binary, project j undersubscribed
    ``delta_k`` binary, lecturer k undersubscribed
    ``eta_j_k`` binary, k = lecturer offering j
    ``e_i_ip``  binary, envy arc s_i -> s_ip        (coalition variant only)
    ``v_i``     integer in [1, n1], topological label (coalition variant only)

The auxiliary expressions theta, gamma and beta are sums over x and are
expanded inline, so each row is a plain linear inequality over the
variables above.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Literal, Mapping

import numpy as np

from .model import Instance, Matching, pref_sets
from .stability import build_envy_graph, topological_order

FAMILIES = tuple(range(1, 12))


@dataclass(frozen=True)
class Var:
    name: str
    kind: Literal["binary", "integer"]
    lb: int = 0
    ub: int = 1


@dataclass(frozen=True)
class Constraint:
    name: str
    family: int
    terms: tuple[tuple[int, str], ...]  # (coef, var name)
    sense: Literal["<=", ">="]
    rhs: int

    def activity(self, values: Mapping[str, float]) -> float:
        return sum(c * values.get(v, 0) for c, v in self.terms)

    def satisfied(self, values: Mapping[str, float]) -> bool:
        lhs = self.activity(values)
        return lhs <= self.rhs if self.sense == "<=" else lhs >= self.rhs


@dataclass(frozen=True)
class IpModel:
    variables: Mapping[str, Var]
    constraints: tuple[Constraint, ...]
    objective: tuple[str, ...]
    n1: int
    n2: int
    n3: int
    with_coalition: bool
    # acceptable pair (i, j) -> x variable name, in objective order
    xvars: Mapping[tuple[int, int], str] = field(repr=False)

    def family(self, f: int) -> list[Constraint]:
        return [c for c in self.constraints if c.family == f]

    def census(self) -> dict[str, int]:
        """Variable and row counts per family (``X``, ``alpha``, ..., ``rows10``)."""
        prefixes = {"X": "x_", "Lambda": "alpha_", "Delta": "delta_", "H": "eta_", "E": "e_", "V": "v_"}
        counts = {key: sum(1 for n in self.variables if n.startswith(pre)) for key, pre in prefixes.items()}
        for f in FAMILIES:
            counts[f"rows{f}"] = 0
        for c in self.constraints:
            counts[f"rows{c.family}"] += 1
        return counts

    def violated(self, values: Mapping[str, float]) -> list[Constraint]:
        return [c for c in self.constraints if not c.satisfied(values)]

    def objective_value(self, values: Mapping[str, float]) -> float:
        return sum(values.get(v, 0) for v in self.objective)


def _row(name, family, coefs: dict[str, int], sense, rhs) -> Constraint:
    # coefs preserves insertion order; merged terms with a zero net coefficient vanish
    terms = tuple((c, v) for v, c in coefs.items() if c != 0)
    return Constraint(name, family, terms, sense, rhs)


def _add(coefs: dict[str, int], var: str, c: int) -> None:
    coefs[var] = coefs.get(var, 0) + c


def build_model(inst: Instance, with_coalition: bool = True) -> IpModel:
    n1, n2, n3 = inst.n1, inst.n2, inst.n3
    sets = pref_sets(inst)
    variables: dict[str, Var] = {}
    xv: dict[tuple[int, int], str] = {}
    for i, j in inst.acceptable_pairs():
        xv[i, j] = name = f"x_{i}_{j}"
        variables[name] = Var(name, "binary")
    for j in range(1, n2 + 1):
        variables[f"alpha_{j}"] = Var(f"alpha_{j}", "binary")
    for k in range(1, n3 + 1):
        variables[f"delta_{k}"] = Var(f"delta_{k}", "binary")
    for p in inst.projects:
        name = f"eta_{p.id}_{p.lecturer}"
        variables[name] = Var(name, "binary")
    if with_coalition:
        for i in range(1, n1 + 1):
            for ip in range(1, n1 + 1):
                if i != ip:
                    variables[f"e_{i}_{ip}"] = Var(f"e_{i}_{ip}", "binary")
        for i in range(1, n1 + 1):
            variables[f"v_{i}"] = Var(f"v_{i}", "integer", 1, n1)

    # students acceptable per project, in student order
    takers: dict[int, list[int]] = {j: [] for j in range(1, n2 + 1)}
    for i, j in xv:
        takers[j].append(i)

    def lecturer_sum(projects) -> dict[str, int]:
        coefs: dict[str, int] = {}
        for i in range(1, n1 + 1):
            for j in inst.student(i).prefs:
                if j in projects:
                    _add(coefs, xv[i, j], 1)
        return coefs

    rows: list[Constraint] = []
    # f1: each student at most one project
    for s in inst.students:
        rows.append(_row(f"f1_s{s.id}", 1, {xv[s.id, j]: 1 for j in s.prefs}, "<=", 1))
    # f2: project capacity
    for p in inst.projects:
        rows.append(_row(f"f2_p{p.id}", 2, {xv[i, p.id]: 1 for i in takers[p.id]}, "<=", p.capacity))
    # f3: lecturer capacity
    for lec in inst.lecturers:
        rows.append(_row(f"f3_l{lec.id}", 3, lecturer_sum(set(lec.prefs)), "<=", lec.capacity))
    # f4: c_j alpha_j >= c_j - sum_i x_ij
    for p in inst.projects:
        coefs = {f"alpha_{p.id}": p.capacity}
        for i in takers[p.id]:
            _add(coefs, xv[i, p.id], 1)
        rows.append(_row(f"f4_p{p.id}", 4, coefs, ">=", p.capacity))

    def theta(i, j, coefs):
        # theta = 1 - sum_{S_ij} x ; constant folded into the rhs by the caller
        for q in inst.student(i).prefs:
            if q in sets.S[i, j]:
                _add(coefs, xv[i, q], -1)

    def beta(i, k, coefs, sign):
        for q in inst.student(i).prefs:
            if inst.lecturer_of(q) == k:
                _add(coefs, xv[i, q], sign)

    # f5: theta + alpha + gamma <= 2
    for i, j in xv:
        k = inst.lecturer_of(j)
        coefs: dict[str, int] = {}
        theta(i, j, coefs)
        _add(coefs, f"alpha_{j}", 1)
        for q in inst.student(i).prefs:
            if q in sets.T[k, j]:
                _add(coefs, xv[i, q], 1)
        rows.append(_row(f"f5_s{i}_p{j}", 5, coefs, "<=", 1))
    # f6: d_k delta_k >= d_k - |M(l_k)|
    for lec in inst.lecturers:
        coefs = {f"delta_{lec.id}": lec.capacity}
        for v, c in lecturer_sum(set(lec.prefs)).items():
            _add(coefs, v, c)
        rows.append(_row(f"f6_l{lec.id}", 6, coefs, ">=", lec.capacity))
    # f7: theta + alpha + (1 - beta) + delta <= 3
    for i, j in xv:
        k = inst.lecturer_of(j)
        coefs = {}
        theta(i, j, coefs)
        _add(coefs, f"alpha_{j}", 1)
        beta(i, k, coefs, -1)
        _add(coefs, f"delta_{k}", 1)
        rows.append(_row(f"f7_s{i}_p{j}", 7, coefs, "<=", 1))
    # f8: d_k eta_jk >= d_k - sum over D_kj
    for p in inst.projects:
        k = p.lecturer
        d = inst.lecturer(k).capacity
        coefs = {f"eta_{p.id}_{k}": d}
        for v, c in lecturer_sum(sets.D[k, p.id]).items():
            _add(coefs, v, c)
        rows.append(_row(f"f8_p{p.id}_l{k}", 8, coefs, ">=", d))
    # f9: theta + alpha + (1 - beta) + eta <= 3
    for i, j in xv:
        k = inst.lecturer_of(j)
        coefs = {}
        theta(i, j, coefs)
        _add(coefs, f"alpha_{j}", 1)
        beta(i, k, coefs, -1)
        _add(coefs, f"eta_{j}_{k}", 1)
        rows.append(_row(f"f9_s{i}_p{j}", 9, coefs, "<=", 1))

    if with_coalition:
        # f10: e_{i,ip} + 1 >= x_ij + x_{ip,jp} where s_i prefers p_jp to p_j
        for i in range(1, n1 + 1):
            prefs = inst.student(i).prefs
            for ip in range(1, n1 + 1):
                if ip == i:
                    continue
                for b, jp in enumerate(prefs):
                    if (ip, jp) not in xv:
                        continue
                    for j in prefs[b + 1 :]:
                        coefs = {f"e_{i}_{ip}": 1, xv[i, j]: -1, xv[ip, jp]: -1}
                        rows.append(_row(f"f10_s{i}_s{ip}_p{j}_p{jp}", 10, coefs, ">=", -1))
        # f11: v_i + 1 <= v_ip + n1 (1 - e_{i,ip})
        for i in range(1, n1 + 1):
            for ip in range(1, n1 + 1):
                if ip != i:
                    coefs = {f"v_{i}": 1, f"v_{ip}": -1, f"e_{i}_{ip}": n1}
                    rows.append(_row(f"f11_s{i}_s{ip}", 11, coefs, "<=", n1 - 1))

    return IpModel(
        variables=MappingProxyType(variables),
        constraints=tuple(rows),
        objective=tuple(xv.values()),
        n1=n1,
        n2=n2,
        n3=n3,
        with_coalition=with_coalition,
        xvars=MappingProxyType(xv),
    )


# ---------------------------------------------------------------------------
# LP export

_LINE = 200


def _expr(terms) -> str:
    parts = []
    for c, v in terms:
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        tok = v if mag == 1 else f"{mag} {v}"
        parts.append(f"{sign} {tok}")
    text = " ".join(parts)
    return text[2:] if text.startswith("+ ") else text


def _wrap(head: str, body: str) -> list[str]:
    line = f"{head}{body}"
    if len(line) <= _LINE:
        return [line]
    out, cur = [], head
    for tok in body.split(" "):
        if len(cur) + len(tok) + 1 > _LINE and cur.strip():
            out.append(cur.rstrip())
            cur = "   "
        cur += tok + " "
    out.append(cur.rstrip())
    return out


def export_lp(model: IpModel) -> str:
    """CPLEX-LP text of the model; identical models give identical text."""
    out = io.StringIO()
    tag = "with" if model.with_coalition else "without"
    out.write(f"\\ MAX-SPA-P model n1={model.n1} n2={model.n2} n3={model.n3}, {tag} coalition rows\n")
    out.write("Maximize\n")
    for line in _wrap(" obj: ", _expr((1, v) for v in model.objective)):
        out.write(line + "\n")
    out.write("Subject To\n")
    for c in model.constraints:
        body = f"{_expr(c.terms)} {c.sense} {c.rhs}"
        for line in _wrap(f" {c.name}: ", body):
            out.write(line + "\n")
    out.write("Bounds\n")
    for v in model.variables.values():
        if v.kind == "integer":
            out.write(f" {v.lb} <= {v.name} <= {v.ub}\n")
    out.write("Binary\n")
    for v in model.variables.values():
        if v.kind == "binary":
            out.write(f" {v.name}\n")
    generals = [v.name for v in model.variables.values() if v.kind == "integer"]
    if generals:
        out.write("General\n")
        for name in generals:
            out.write(f" {name}\n")
    out.write("End\n")
    return out.getvalue()


# ---------------------------------------------------------------------------
# solutions <-> matchings


class NonIntegralSolutionError(ValueError):
    pass


def extract_matching(model: IpModel, values: Mapping[str, float], tol: float = 1e-6) -> Matching:
    pairs = []
    for (i, j), name in model.xvars.items():
        val = float(values.get(name, 0.0))
        if abs(val) <= tol:
            continue
        if abs(val - 1.0) > tol:
            raise NonIntegralSolutionError(f"{name} = {val} is not integral")
        pairs.append((i, j))
    return Matching(pairs)


def solution_from_matching(model: IpModel, inst: Instance, m: Matching) -> dict[str, int]:
    """Variable assignment induced by a matching.

    x follows ``m``; each indicator takes the smallest value its defining
    row allows: alpha_j (delta_k) is 1 iff the project (lecturer) is
    undersubscribed, eta_jk is 1 iff l_k has fewer than d_k students on
    projects it ranks at least as high as p_j, e is the envy graph and v a
    topological labelling of it.  If the matching is stable every row holds.
    When the envy graph has a cycle, v is left at 1 for every student.
    """
    values = dict.fromkeys(model.variables, 0)
    for s, p in m:
        values[model.xvars[s, p]] = 1
    pcount = m.project_counts(inst)
    lcount = m.lecturer_counts(inst)
    for p in inst.projects:
        values[f"alpha_{p.id}"] = int(pcount[p.id - 1] < p.capacity)
    for lec in inst.lecturers:
        values[f"delta_{lec.id}"] = int(lcount[lec.id - 1] < lec.capacity)
        better = 0
        for p in lec.prefs:
            better += pcount[p - 1]
            values[f"eta_{p}_{lec.id}"] = int(better < lec.capacity)
    if model.with_coalition:
        g = build_envy_graph(inst, m)
        for u, v in g.arcs:
            values[f"e_{u}_{v}"] = 1
        order = topological_order(g, range(1, inst.n1 + 1))
        for pos, s in enumerate(order or [], 1):
            values[f"v_{s}"] = pos
        if order is None:
            for s in range(1, inst.n1 + 1):
                values[f"v_{s}"] = 1
    return values


# ---------------------------------------------------------------------------
# dense array form used by the search kernels


@dataclass(frozen=True)
class ModelArrays:
    """Rows in ``<=`` form as CSR, plus the bookkeeping the leaf test needs."""

    row_ptr: np.ndarray
    row_idx: np.ndarray
    row_coef: np.ndarray
    row_rhs: np.ndarray
    xidx: np.ndarray  # (n1, maxlen) var index of x for list position, -1 padding
    aux_vars: np.ndarray  # binary indicators fixed from their defining rows
    aux_ptr: np.ndarray
    aux_rows: np.ndarray
    e_vars: np.ndarray
    e_src: np.ndarray  # 0-based students
    e_dst: np.ndarray
    v_vars: np.ndarray  # indexed by 0-based student, empty without coalition rows
    nvars: int


def model_arrays(model: IpModel, inst: Instance) -> ModelArrays:
    index = {name: t for t, name in enumerate(model.variables)}
    ptr, idx, coef, rhs = [0], [], [], []
    for c in model.constraints:
        sign = 1 if c.sense == "<=" else -1
        for a, v in c.terms:
            idx.append(index[v])
            coef.append(sign * a)
        rhs.append(sign * c.rhs)
        ptr.append(len(idx))
    row_ptr = np.asarray(ptr, dtype=np.int64)
    row_idx = np.asarray(idx, dtype=np.int64)
    row_coef = np.asarray(coef, dtype=np.int64)

    maxlen = max(len(s.prefs) for s in inst.students)
    xidx = np.full((inst.n1, maxlen), -1, dtype=np.int64)
    for s in inst.students:
        for t, p in enumerate(s.prefs):
            xidx[s.id - 1, t] = index[model.xvars[s.id, p]]

    # an indicator's defining rows are those where raising it relaxes the row
    aux_names = [n for n, v in model.variables.items() if v.kind == "binary" and not n.startswith("x_")]
    defining: dict[int, list[int]] = {index[n]: [] for n in aux_names}
    for r in range(len(model.constraints)):
        for t in range(ptr[r], ptr[r + 1]):
            if idx[t] in defining and coef[t] < 0:
                defining[idx[t]].append(r)
    aux_vars = np.asarray(sorted(defining), dtype=np.int64)
    aux_ptr = np.zeros(len(aux_vars) + 1, dtype=np.int64)
    aux_rows = []
    for a, var in enumerate(aux_vars):
        aux_rows.extend(defining[int(var)])
        aux_ptr[a + 1] = len(aux_rows)

    e_vars, e_src, e_dst = [], [], []
    v_vars = []
    if model.with_coalition:
        for name in model.variables:
            if name.startswith("e_"):
                _, i, ip = name.split("_")
                e_vars.append(index[name])
                e_src.append(int(i) - 1)
                e_dst.append(int(ip) - 1)
        v_vars = [index[f"v_{i}"] for i in range(1, inst.n1 + 1)]

    as64 = lambda a: np.asarray(a, dtype=np.int64)  # noqa: E731
    return ModelArrays(
        row_ptr=row_ptr,
        row_idx=row_idx,
        row_coef=row_coef,
        row_rhs=as64(rhs),
        xidx=xidx,
        aux_vars=aux_vars,
        aux_ptr=aux_ptr,
        aux_rows=as64(aux_rows),
        e_vars=as64(e_vars),
        e_src=as64(e_src),
        e_dst=as64(e_dst),
        v_vars=as64(v_vars),
        nvars=len(index),
    )
