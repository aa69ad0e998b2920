"""Exact maximum stable matchings: an exhaustive oracle and a branch and bound."""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Iterator, Literal

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_flow

from . import _kernels as K
from .approx import approx_three_halves
from .ipmodel import IpModel, build_model, model_arrays
from .model import Instance, Matching
from .stability import CoalitionEliminationError, eliminate_coalitions, is_stable

Mode = Literal["with-coalition", "no-coalition+rotate"]
MODES: tuple[Mode, ...] = ("with-coalition", "no-coalition+rotate")

DEFAULT_ORACLE_NODES = 20_000_000
CHUNK = 50_000


class BudgetExceeded(RuntimeError):
    """A search hit its node or time limit.

    ``incumbent`` is the best stable matching known at that point (possibly
    None); with ``lower_bound`` set its size only bounds the optimum from below.
    """

    def __init__(self, message, incumbent: Matching | None = None, nodes: int = 0, lower_bound: bool = True):
        super().__init__(message)
        self.incumbent = incumbent
        self.nodes = nodes
        self.lower_bound = lower_bound

    @property
    def size(self) -> int:
        return 0 if self.incumbent is None else len(self.incumbent)


@dataclass(frozen=True)
class OptimalResult:
    matching: Matching
    size: int
    nodes_explored: int
    wall_time: float
    mode: str
    rejected_leaves: int = 0  # accepted by the rows, then lost on rotation


def normalize_mode(mode: str) -> Mode:
    if mode in ("no-coalition", "no-coalition+rotate"):
        return "no-coalition+rotate"
    if mode == "with-coalition":
        return "with-coalition"
    raise ValueError(f"unknown mode {mode!r}; use with-coalition or no-coalition")


def _to_matching(inst: Instance, assign: np.ndarray) -> Matching:
    return Matching((i + 1, int(p) + 1) for i, p in enumerate(assign) if p >= 0)


def enumerate_stable(inst: Instance, max_nodes: int | None = DEFAULT_ORACLE_NODES,
                     coalition_free: bool = True) -> Iterator[Matching]:
    """Every stable matching, in depth-first order.

    With ``coalition_free=False`` the coalition test is skipped and every
    matching without a blocking pair is produced.  Raises BudgetExceeded
    once more than ``max_nodes`` search nodes have been created.
    """
    a = K.pack_instance(inst)
    st, choice, assign, pcount, lcount, _, _, worst = K.new_state(
        inst.n1, inst.n2, inst.n3, a, max_nodes=-1 if max_nodes is None else max_nodes
    )
    flag = 1 if coalition_free else 0
    while True:
        status = K.oracle_step(
            a.pref, a.plen, a.srank, a.plect, a.pcap, a.lcap, a.lrank, flag,
            st, choice, assign, pcount, lcount, worst, CHUNK,
        )
        if status == K.FOUND:
            yield _to_matching(inst, assign)
        elif status == K.DONE:
            return
        elif status == K.BUDGET:
            raise BudgetExceeded(f"enumeration exceeded {max_nodes} nodes", nodes=int(st[K.ST_NODES]))


def max_stable_oracle(inst: Instance, max_nodes: int | None = DEFAULT_ORACLE_NODES) -> OptimalResult:
    """Largest stable matching by enumeration; ties go to the smallest
    assignment vector (project id per student, 0 for unassigned)."""
    t0 = time.perf_counter()
    best, best_key = None, None
    for m in enumerate_stable(inst, max_nodes):
        key = (-len(m), m.vector(inst.n1))
        if best_key is None or key < best_key:
            best, best_key = m, key
    assert best is not None, "every instance admits a stable matching"
    return OptimalResult(best, len(best), -1, time.perf_counter() - t0, "oracle")


def capacity_bound(inst: Instance) -> int:
    """Largest matching ignoring stability: a max flow source -> students ->
    projects -> lecturers -> sink.  No stable matching is larger."""
    n1, n2, n3 = inst.n1, inst.n2, inst.n3
    src, sink = 0, n1 + n2 + n3 + 1
    rows, cols, caps = [], [], []

    def arc(u, v, c):
        rows.append(u)
        cols.append(v)
        caps.append(c)

    for s in inst.students:
        arc(src, s.id, 1)
        for p in s.prefs:
            arc(s.id, n1 + p, 1)
    for p in inst.projects:
        arc(n1 + p.id, n1 + n2 + p.lecturer, p.capacity)
    for lec in inst.lecturers:
        arc(n1 + n2 + lec.id, sink, lec.capacity)
    graph = csr_matrix((np.asarray(caps, dtype=np.int32), (rows, cols)), shape=(sink + 1, sink + 1))
    return int(maximum_flow(graph, src, sink).flow_value)


def completion_bound(inst: Instance, prefix: Matching, depth: int) -> int:
    """Upper bound on any feasible completion once students 1..depth are fixed
    as in ``prefix``; the same quantity the branch and bound prunes with.

    Each lecturer can still absorb at most the least of its residual
    capacity, the residual capacity of its projects, and the number of
    unfixed students with an open project of it.
    """
    pcount, lcount = prefix.project_counts(inst), prefix.lecturer_counts(inst)
    open_p = {p.id for p in inst.projects
              if pcount[p.id - 1] < p.capacity and lcount[p.lecturer - 1] < inst.lecturer(p.lecturer).capacity}
    free = 0
    reach = [0] * inst.n3
    for s in inst.students[depth:]:
        ks = {inst.lecturer_of(p) for p in s.prefs if p in open_p}
        free += bool(ks)
        for k in ks:
            reach[k - 1] += 1
    room = 0
    for lec in inst.lecturers:
        pres = sum(inst.project(p).capacity - pcount[p - 1] for p in lec.prefs)
        room += min(lec.capacity - lcount[lec.id - 1], pres, reach[lec.id - 1])
    return len(prefix) + min(room, free)


class _Search:
    """Resumable branch and bound over one model."""

    def __init__(self, inst: Instance, model: IpModel, lookahead: bool, incumbent: int, max_nodes: int):
        self.inst = inst
        self.a = K.pack_instance(inst)
        self.m = model_arrays(model, inst)
        self.state = K.new_state(inst.n1, inst.n2, inst.n3, self.a, incumbent=incumbent, max_nodes=max_nodes)
        self.z = np.zeros(self.m.nvars, dtype=np.int64)
        self.pres = np.zeros(3 * inst.n3, dtype=np.int64)
        self.lookahead = 1 if lookahead else 0

    @property
    def st(self):
        return self.state[0]

    @property
    def assign(self):
        return self.state[2]

    def step(self, chunk: int = CHUNK) -> int:
        a, m = self.a, self.m
        st, choice, assign, pcount, lcount, remp, reml, worst = self.state
        return K.bb_step(
            a.pref, a.plen, a.plect, a.pcap, a.lcap, a.lrank, a.sdl, a.sdlen, self.lookahead,
            m.row_ptr, m.row_idx, m.row_coef, m.row_rhs, m.xidx, m.aux_vars, m.aux_ptr, m.aux_rows,
            m.e_vars, m.e_src, m.e_dst, m.v_vars,
            st, choice, assign, pcount, lcount, remp, reml, worst, self.pres, self.z, chunk,
        )


def solve_exact(
    inst: Instance,
    mode: str = "no-coalition+rotate",
    max_nodes: int | None = None,
    time_limit: float | None = None,
    incumbent: Matching | None = None,
    warm_start: bool = True,
    lookahead: bool = True,
    flow_bound: bool = True,
    trace: list | None = None,
) -> OptimalResult:
    """Maximum stable matching by branch and bound over the model's x variables.

    ``incumbent`` (a stable matching) and, with ``warm_start``, one run of
    the 3/2-approximation seed the lower bound; the search stops early once
    it meets :func:`capacity_bound`.  In no-coalition mode each
    improving leaf is rotated coalition-free; a leaf whose rotation creates
    a blocking pair is rejected and the search goes on, so the answer is
    still a maximum stable matching.  ``trace``, if given, receives the
    incumbent size each time it changes.
    """
    mode = normalize_mode(mode)
    t0 = time.perf_counter()
    best: Matching | None = None
    for cand in (incumbent, approx_three_halves(inst, 0) if warm_start else None):
        if cand is None:
            continue
        if not is_stable(inst, cand).stable:
            raise ValueError(f"incumbent is not stable: {cand.literal()}")
        if best is None or len(cand) > len(best):
            best = cand
    if trace is not None and best is not None:
        trace.append(len(best))

    upper = capacity_bound(inst) if flow_bound else inst.n1
    if best is not None and len(best) >= upper:
        return OptimalResult(best, len(best), 0, time.perf_counter() - t0, mode)

    model = build_model(inst, with_coalition=(mode == "with-coalition"))
    search = _Search(
        inst, model, lookahead,
        incumbent=-1 if best is None else len(best),
        max_nodes=-1 if max_nodes is None else max_nodes,
    )
    rejected = 0
    while True:
        status = search.step()
        if status == K.FOUND:
            found = _to_matching(inst, search.assign)
            if mode == "no-coalition+rotate":
                try:
                    found = eliminate_coalitions(inst, found)
                except CoalitionEliminationError:
                    rejected += 1
                    continue
            best = found
            search.st[K.ST_INCUMBENT] = len(found)
            if trace is not None:
                trace.append(len(found))
            if len(found) >= upper:
                break
        elif status == K.DONE:
            break
        elif status == K.BUDGET:
            raise BudgetExceeded(
                f"branch and bound exceeded {max_nodes} nodes", best, int(search.st[K.ST_NODES])
            )
        elif time_limit is not None and time.perf_counter() - t0 > time_limit:
            raise BudgetExceeded(
                f"branch and bound exceeded {time_limit}s", best, int(search.st[K.ST_NODES])
            )
    if best is None:
        best = Matching(())  # only reachable when nothing is stable, which cannot happen
    return OptimalResult(
        best, len(best), int(search.st[K.ST_NODES]), time.perf_counter() - t0, mode, rejected
    )
