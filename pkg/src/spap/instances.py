"""Random SPA-P instances and lecturer-preference derivation."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .model import Instance, Lecturer, Project, Student

PopularityMode = Literal["random", "ascending", "descending"]
POPULARITY_MODES: tuple[PopularityMode, ...] = ("random", "ascending", "descending")


@dataclass(frozen=True)
class GenParams:
    """Generator settings.

    ``n2``, ``n3`` and ``total_capacity`` default to the floor of the ratio
    times n1; they can be overridden to mimic a fixed dataset shape.
    ``pref_len`` fixes every list length; otherwise lengths are uniform in
    ``[pref_min, pref_max]``.
    """

    n1: int
    project_ratio: float = 0.5
    lecturer_ratio: float = 0.2
    capacity_ratio: float = 1.1
    pref_min: int = 2
    pref_max: int = 5
    pref_len: int | None = None
    seed: int = 0
    n2: int | None = None
    n3: int | None = None
    total_capacity: int | None = None

    @property
    def projects(self) -> int:
        return self.n2 if self.n2 is not None else math.floor(self.project_ratio * self.n1)

    @property
    def lecturers(self) -> int:
        return self.n3 if self.n3 is not None else math.floor(self.lecturer_ratio * self.n1)

    @property
    def capacity(self) -> int:
        if self.total_capacity is not None:
            return self.total_capacity
        return math.floor(self.capacity_ratio * self.n1)

    @property
    def length_range(self) -> tuple[int, int]:
        if self.pref_len is not None:
            return self.pref_len, self.pref_len
        return self.pref_min, self.pref_max

    def validate(self) -> None:
        if self.n1 < 1:
            raise ValueError("n1 must be positive")
        if min(self.project_ratio, self.lecturer_ratio, self.capacity_ratio) <= 0:
            raise ValueError("ratios must be positive")
        n2, n3 = self.projects, self.lecturers
        if n2 < 1:
            raise ValueError(f"n1={self.n1} gives no projects")
        if n3 < 1:
            raise ValueError(f"n1={self.n1} gives no lecturers")
        if n3 > n2:
            raise ValueError(f"{n3} lecturers cannot each offer one of {n2} projects")
        if self.capacity < n2:
            raise ValueError(f"total capacity {self.capacity} below project count {n2}")
        lo, hi = self.length_range
        if lo < 1 or lo > hi:
            raise ValueError(f"bad preference length range [{lo}, {hi}]")
        if hi > n2:
            raise ValueError(f"preference length {hi} exceeds project count {n2}")


def _owners(rng: np.random.Generator, n2: int, n3: int) -> np.ndarray:
    # uniform draws, redrawn until every lecturer offers something
    for _ in range(1000):
        owner = rng.integers(n3, size=n2)
        if np.unique(owner).size == n3:
            return owner
    # near n3 == n2 redraws rarely succeed: seed each lecturer with one project
    owner = rng.integers(n3, size=n2)
    owner[rng.permutation(n2)[:n3]] = np.arange(n3)
    return owner


def generate(params: GenParams) -> Instance:
    params.validate()
    rng = np.random.default_rng(params.seed)
    n1, n2, n3 = params.n1, params.projects, params.lecturers

    caps = np.ones(n2, dtype=np.int64)
    extra = params.capacity - n2
    if extra:
        caps += np.bincount(rng.integers(n2, size=extra), minlength=n2)

    owner = _owners(rng, n2, n3)
    lecturers = []
    for k in range(n3):
        mine = np.flatnonzero(owner == k)
        lo, hi = int(caps[mine].max()), int(caps[mine].sum())
        d = int(rng.integers(lo, hi + 1))
        order = rng.permutation(mine)
        lecturers.append(Lecturer(k + 1, d, tuple(int(p) + 1 for p in order)))

    lo, hi = params.length_range
    students = []
    for i in range(n1):
        length = int(rng.integers(lo, hi + 1))
        picks = rng.choice(n2, size=length, replace=False)
        students.append(Student(i + 1, tuple(int(p) + 1 for p in picks)))

    projects = tuple(Project(j + 1, int(caps[j]), int(owner[j]) + 1) for j in range(n2))
    return Instance(tuple(students), projects, tuple(lecturers))


def popularity(inst: Instance) -> list[int]:
    """a_j: number of students finding p_j acceptable, indexed by j-1."""
    counts = [0] * inst.n2
    for s in inst.students:
        for p in s.prefs:
            counts[p - 1] += 1
    return counts


def derive_lecturer_prefs(inst: Instance, mode: PopularityMode, seed=0) -> Instance:
    """Reorder each lecturer's list by project popularity (ties by project id)."""
    if mode not in POPULARITY_MODES:
        raise ValueError(f"unknown popularity mode {mode!r}")
    a = popularity(inst)
    rng = np.random.default_rng(seed)
    lecturers = []
    for lec in inst.lecturers:
        ids = sorted(lec.prefs)
        if mode == "random":
            order = tuple(int(p) for p in rng.permutation(ids))
        elif mode == "ascending":
            order = tuple(sorted(ids, key=lambda p: (a[p - 1], p)))
        else:
            order = tuple(sorted(ids, key=lambda p: (-a[p - 1], p)))
        lecturers.append(Lecturer(lec.id, lec.capacity, order))
    return Instance(inst.students, inst.projects, tuple(lecturers))


# (year, n1, n2, n3, list length); every project has capacity 1
COHORT_SHAPES = {
    2014: (55, 149, 38, 6),
    2015: (76, 197, 46, 6),
    2016: (92, 214, 44, 6),
    2017: (90, 289, 59, 4),
}


def standin_params(year: int, seed: int = 0) -> GenParams:
    n1, n2, n3, length = COHORT_SHAPES[year]
    return GenParams(n1=n1, n2=n2, n3=n3, total_capacity=n2, pref_len=length, seed=seed)
