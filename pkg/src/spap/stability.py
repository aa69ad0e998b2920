"""Feasibility and stability checks, envy graphs and coalition elimination.

These are straightforward, definition-level routines working on
:class:`~spap.model.Instance` / :class:`~spap.model.Matching` objects.  The
array kernels in :mod:`spap._kernels` implement the same tests for the
search loops; the two are cross-checked in the test-suite.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

from .model import Instance, Matching, prefers_student, rank_lecturer

BlockType = Literal["1a", "1b", "1c"]


class InfeasibleMatchingError(ValueError):
    pass


class CoalitionEliminationError(RuntimeError):
    """Rotating a coalition produced a matching with a blocking pair.

    ``matching`` is the rotated matching, ``blocking`` its blocking pairs.
    """

    def __init__(self, message, matching=None, blocking=()):
        super().__init__(message)
        self.matching = matching
        self.blocking = list(blocking)


@dataclass(frozen=True)
class BlockingPairReport:
    student: int
    project: int
    type: BlockType

    def __str__(self) -> str:
        return f"BLOCK s{self.student} p{self.project} type={self.type}"


@dataclass(frozen=True)
class EnvyGraph:
    vertices: tuple[int, ...]
    arcs: frozenset[tuple[int, int]]

    def successors(self, s: int) -> list[int]:
        return sorted(t for (u, t) in self.arcs if u == s)


@dataclass(frozen=True)
class Verdict:
    status: Literal["stable", "blocking", "coalition", "infeasible"]
    blocking_pairs: list[BlockingPairReport] = field(default_factory=list)
    coalition: list[int] | None = None
    violations: list[str] = field(default_factory=list)

    @property
    def stable(self) -> bool:
        return self.status == "stable"

    def lines(self) -> list[str]:
        out = [f"INFEASIBLE {v}" for v in self.violations]
        out += [str(bp) for bp in self.blocking_pairs]
        if self.coalition:
            out.append("COALITION " + ",".join(f"s{s}" for s in self.coalition))
        return out or ["STABLE"]


def check_feasible(inst: Instance, m: Matching) -> list[str]:
    """Return human-readable violations; an empty list means ``m`` is a matching."""
    problems = []
    for s, p in m:
        if not 1 <= s <= inst.n1:
            problems.append(f"unknown student s{s}")
        elif not 1 <= p <= inst.n2:
            problems.append(f"unknown project p{p}")
        elif not inst.acceptable(s, p):
            problems.append(f"(s{s}, p{p}) is not an acceptable pair")
    if problems:
        return problems
    for j, n in enumerate(m.project_counts(inst), 1):
        cap = inst.project(j).capacity
        if n > cap:
            problems.append(f"p{j} oversubscribed ({n} > {cap})")
    for k, n in enumerate(m.lecturer_counts(inst), 1):
        cap = inst.lecturer(k).capacity
        if n > cap:
            problems.append(f"l{k} oversubscribed ({n} > {cap})")
    return problems


def worst_nonempty(inst: Instance, m: Matching, k: int, pcount=None) -> int | None:
    """Lecturer k's lowest-ranked project with at least one assigned student."""
    if pcount is None:
        pcount = m.project_counts(inst)
    for p in reversed(inst.offered(k)):
        if pcount[p - 1] > 0:
            return p
    return None


def find_blocking_pairs(inst: Instance, m: Matching) -> list[BlockingPairReport]:
    violations = check_feasible(inst, m)
    if violations:
        raise InfeasibleMatchingError("; ".join(violations))
    pcount = m.project_counts(inst)
    lcount = m.lecturer_counts(inst)
    worst = {k: worst_nonempty(inst, m, k, pcount) for k in range(1, inst.n3 + 1)}

    found = []
    for s, p in inst.acceptable_pairs():
        current = m.project_of(s)
        if current == p or not prefers_student(inst, s, p, current):
            continue
        if pcount[p - 1] >= inst.project(p).capacity:
            continue
        k = inst.lecturer_of(p)
        lec = inst.lecturer(k)
        kind = None
        if current is not None and inst.lecturer_of(current) == k:
            if rank_lecturer(inst, k, p) < rank_lecturer(inst, k, current):
                kind = "1a"
        elif lcount[k - 1] < lec.capacity:
            kind = "1b"
        elif worst[k] is not None and rank_lecturer(inst, k, p) < rank_lecturer(inst, k, worst[k]):
            kind = "1c"
        if kind:
            found.append(BlockingPairReport(s, p, kind))
    return found


def build_envy_graph(inst: Instance, m: Matching) -> EnvyGraph:
    assigned = tuple(s for s, _ in m)
    arcs = set()
    for s in assigned:
        mine = m.project_of(s)
        for t in assigned:
            if t == s:
                continue
            theirs = m.project_of(t)
            if theirs != mine and inst.acceptable(s, theirs) and prefers_student(inst, s, theirs, mine):
                arcs.add((s, t))
    return EnvyGraph(assigned, frozenset(arcs))


def find_coalition(g: EnvyGraph) -> list[int] | None:
    """Depth-first search from the lowest id; returns the first cycle closed."""
    succ = {v: g.successors(v) for v in g.vertices}
    colour = dict.fromkeys(g.vertices, 0)  # 0 new, 1 on stack, 2 done
    for root in sorted(g.vertices):
        if colour[root]:
            continue
        path = [root]
        iters = [iter(succ[root])]
        colour[root] = 1
        while path:
            nxt = next(iters[-1], None)
            if nxt is None:
                colour[path.pop()] = 2
                iters.pop()
            elif colour[nxt] == 1:
                return path[path.index(nxt) :]
            elif colour[nxt] == 0:
                colour[nxt] = 1
                path.append(nxt)
                iters.append(iter(succ[nxt]))
    return None


def topological_order(g: EnvyGraph, students) -> list[int] | None:
    """Kahn ordering of ``students`` under the arcs of ``g`` (lowest id first)."""
    import heapq

    indeg = dict.fromkeys(students, 0)
    succ: dict[int, list[int]] = {s: [] for s in students}
    for u, v in g.arcs:
        succ[u].append(v)
        indeg[v] += 1
    heap = [s for s, d in indeg.items() if d == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        u = heapq.heappop(heap)
        order.append(u)
        for v in succ[u]:
            indeg[v] -= 1
            if indeg[v] == 0:
                heapq.heappush(heap, v)
    return order if len(order) == len(indeg) else None


def rotate(m: Matching, cycle: list[int]) -> Matching:
    """Each student in ``cycle`` takes the project of the next one."""
    r = len(cycle)
    return m.with_assignment({s: m.project_of(cycle[(t + 1) % r]) for t, s in enumerate(cycle)})


def eliminate_coalitions(inst: Instance, m: Matching) -> Matching:
    """Rotate envy cycles away until the matching is coalition-free.

    Project and lecturer occupancy are untouched by a rotation and every
    rotated student strictly improves, so the loop terminates.  A rotation
    can however create a new blocking pair (a student moving inside one
    lecturer's projects may end up on a project the lecturer ranks below an
    undersubscribed one the student prefers).  That case raises
    :class:`CoalitionEliminationError` rather than returning an unstable
    matching.
    """
    bps = find_blocking_pairs(inst, m)
    if bps:
        raise CoalitionEliminationError(
            f"input matching has {len(bps)} blocking pair(s)", m, bps
        )
    while True:
        cycle = find_coalition(build_envy_graph(inst, m))
        if cycle is None:
            break
        m = rotate(m, cycle)
    bps = find_blocking_pairs(inst, m)
    if bps:
        raise CoalitionEliminationError(
            f"coalition rotation introduced blocking pair {bps[0]}", m, bps
        )
    return m


def is_stable(inst: Instance, m: Matching) -> Verdict:
    violations = check_feasible(inst, m)
    if violations:
        return Verdict("infeasible", violations=violations)
    bps = find_blocking_pairs(inst, m)
    cycle = find_coalition(build_envy_graph(inst, m))
    if bps:
        return Verdict("blocking", bps, cycle)
    if cycle:
        return Verdict("coalition", [], cycle)
    return Verdict("stable")
