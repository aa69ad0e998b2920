"""Randomised approximation algorithms for MAX-SPA-P.

Both algorithms are student-proposing.  A free student applies to the first
project left on their list.  An application to p (offered by l) fails, and p
is struck off their list, when p is full, or l is full and does not rank p
above its worst non-empty project.  Otherwise the student is assigned to p; if l was
full, a random student on l's worst non-empty project is rejected and
strikes that project off their own list.

The 3/2 variant adds one promotion round: a student whose list runs out is
promoted once, their list restored.  Promoted students win ties against
unpromoted ones on the same project: a promoted applicant to a full project
(or to the worst non-empty project of a full lecturer) displaces an
unpromoted occupant, and rejections pick unpromoted students first.

Every strike happens at a moment when p is full, or l is full with its
worst non-empty project no worse than p; both facts persist for the rest
of the run, which is what makes the result free of blocking pairs.  They
also depend only on occupancy, so the coalition-removal rotations applied
at the end cannot create a blocking pair.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .model import Instance, Matching
from .stability import eliminate_coalitions

Algorithm = Literal["two", "three-halves"]


@dataclass(frozen=True)
class ApproxConfig:
    algorithm: Algorithm = "three-halves"
    runs: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if self.algorithm not in ("two", "three-halves"):
            raise ValueError(f"unknown algorithm {self.algorithm!r}")


@dataclass
class ApproxStats:
    proposals: int = 0
    promotions: int = 0


def _propose(inst: Instance, seed, promote: bool, stats: ApproxStats | None = None) -> Matching:
    rng = np.random.default_rng(seed)
    n1 = inst.n1
    prefs = [()] + [s.prefs for s in inst.students]
    lect = [0] + [p.lecturer for p in inst.projects]
    pcap = [0] + [p.capacity for p in inst.projects]
    lcap = [0] + [lec.capacity for lec in inst.lecturers]
    lrank = [0] * (inst.n2 + 1)
    for lec in inst.lecturers:
        for r, p in enumerate(lec.prefs, 1):
            lrank[p] = r
    offered = [()] + [lec.prefs for lec in inst.lecturers]

    ptr = [0] * (n1 + 1)
    level = [0] * (n1 + 1)
    on: list[list[int]] = [[] for _ in range(inst.n2 + 1)]  # students on each project
    lcount = [0] * (inst.n3 + 1)
    where = [0] * (n1 + 1)

    def worst(k):
        for p in reversed(offered[k]):
            if on[p]:
                return p
        return 0

    def pick(students):
        if promote:
            fresh = [s for s in students if level[s] == 0]
            if fresh:
                students = fresh
        return students[int(rng.integers(len(students)))]

    def unassign(s):
        p = where[s]
        on[p].remove(s)
        lcount[lect[p]] -= 1
        where[s] = 0
        ptr[s] += 1  # strike p
        queue.append(s)

    def assign(s, p):
        on[p].append(s)
        lcount[lect[p]] += 1
        where[s] = p

    queue = deque(int(s) + 1 for s in rng.permutation(n1))
    proposals = 0
    while queue:
        s = queue.popleft()
        while True:
            if ptr[s] >= len(prefs[s]):
                if promote and level[s] == 0:
                    level[s] = 1
                    ptr[s] = 0
                    if stats is not None:
                        stats.promotions += 1
                    queue.append(s)
                break
            p = prefs[s][ptr[s]]
            k = lect[p]
            proposals += 1
            if len(on[p]) >= pcap[p] or (lcount[k] >= lcap[k] and lrank[p] >= lrank[worst(k)]):
                # a promoted applicant may displace an unpromoted student on p
                # when p is full or is the lecturer's worst non-empty project
                if promote and level[s] == 1 and on[p] and (len(on[p]) >= pcap[p] or worst(k) == p):
                    fresh = [t for t in on[p] if level[t] == 0]
                    if fresh:
                        victim = fresh[int(rng.integers(len(fresh)))]
                        unassign(victim)
                        assign(s, p)
                        break
                ptr[s] += 1
                continue
            if lcount[k] >= lcap[k]:
                w = worst(k)
                unassign(pick(on[w]))
            assign(s, p)
            break

    if stats is not None:
        stats.proposals += proposals
    return Matching((s, where[s]) for s in range(1, n1 + 1) if where[s])


def approx_two(inst: Instance, seed=0, stats: ApproxStats | None = None) -> Matching:
    """Stable matching of size at least half the maximum."""
    m = _propose(inst, seed, promote=False, stats=stats)
    return eliminate_coalitions(inst, m)


def approx_three_halves(inst: Instance, seed=0, stats: ApproxStats | None = None) -> Matching:
    """Stable matching of size at least two thirds of the maximum."""
    m = _propose(inst, seed, promote=True, stats=stats)
    return eliminate_coalitions(inst, m)


ALGORITHMS = {"two": approx_two, "three-halves": approx_three_halves}


def best_of_runs(inst: Instance, cfg: ApproxConfig) -> Matching:
    """Largest output over seeds ``cfg.seed .. cfg.seed + runs - 1`` (first wins ties)."""
    algo = ALGORITHMS[cfg.algorithm]
    best = None
    for r in range(cfg.runs):
        m = algo(inst, cfg.seed + r)
        if best is None or len(m) > len(best):
            best = m
            if len(best) == inst.n1:
                break
    return best
