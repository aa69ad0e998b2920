"""Definition-level reference checks, written independently of spap.stability.

Everything is recomputed from raw preference lists with plain Python so the
package can be compared against it.
"""

from __future__ import annotations

import itertools


def _views(inst, vec):
    """vec[i-1] is the project of student i or 0."""
    pc = {p.id: 0 for p in inst.projects}
    lc = {lec.id: 0 for lec in inst.lecturers}
    for p in vec:
        if p:
            pc[p] += 1
            lc[inst.projects[p - 1].lecturer] += 1
    return pc, lc


def feasible(inst, vec) -> bool:
    pc, lc = _views(inst, vec)
    ok_accept = all(p == 0 or p in inst.students[i].prefs for i, p in enumerate(vec))
    ok_p = all(pc[p.id] <= p.capacity for p in inst.projects)
    ok_l = all(lc[lec.id] <= lec.capacity for lec in inst.lecturers)
    return ok_accept and ok_p and ok_l


def blocking(inst, vec) -> set[tuple[int, int]]:
    """Every (student, project) blocking pair, from the three clauses."""
    pc, lc = _views(inst, vec)
    out = set()
    for i, s in enumerate(inst.students, 1):
        cur = vec[i - 1]
        for p in s.prefs:
            if p == cur:
                continue
            if cur and s.prefs.index(p) > s.prefs.index(cur):
                continue
            proj = inst.projects[p - 1]
            if pc[p] >= proj.capacity:
                continue
            k = proj.lecturer
            lec = inst.lecturers[k - 1]
            if cur and inst.projects[cur - 1].lecturer == k:
                if lec.prefs.index(p) < lec.prefs.index(cur):
                    out.add((i, p))
                continue
            if lc[k] < lec.capacity:
                out.add((i, p))
                continue
            used = [q for q in lec.prefs if pc[q] > 0]
            if used and lec.prefs.index(p) < lec.prefs.index(used[-1]):
                out.add((i, p))
    return out


def envy_arcs(inst, vec) -> set[tuple[int, int]]:
    arcs = set()
    for i, p in enumerate(vec, 1):
        for t, q in enumerate(vec, 1):
            if i != t and p and q and q in inst.students[i - 1].prefs:
                prefs = inst.students[i - 1].prefs
                if prefs.index(q) < prefs.index(p):
                    arcs.add((i, t))
    return arcs


def has_cycle(arcs) -> bool:
    # peel off vertices without outgoing arcs until nothing changes
    arcs = set(arcs)
    while True:
        tails = {u for u, _ in arcs}
        keep = {(u, v) for u, v in arcs if v in tails}
        if keep == arcs:
            return bool(arcs)
        arcs = keep


def stable(inst, vec) -> bool:
    return feasible(inst, vec) and not blocking(inst, vec) and not has_cycle(envy_arcs(inst, vec))


def all_vectors(inst):
    return itertools.product(*[(0,) + s.prefs for s in inst.students])


def stable_set(inst, coalition_free: bool = True) -> set[tuple[int, ...]]:
    out = set()
    for vec in all_vectors(inst):
        if feasible(inst, vec) and not blocking(inst, vec):
            if not coalition_free or not has_cycle(envy_arcs(inst, vec)):
                out.add(tuple(vec))
    return out
