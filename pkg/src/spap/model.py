"""Instance and matching data model for SPA-P.

Students, projects and lecturers carry dense 1-based ids.  An
:class:`Instance` is validated on construction and never mutated
afterwards, so it can be shared freely between solver runs.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from functools import cached_property
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, TextIO


class InstanceError(ValueError):
    """An instance violates one of the model invariants."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NotAcceptableError(KeyError):
    pass


class NotOfferedError(KeyError):
    pass


@dataclass(frozen=True)
class Student:
    id: int
    prefs: tuple[int, ...]


@dataclass(frozen=True)
class Project:
    id: int
    capacity: int
    lecturer: int


@dataclass(frozen=True)
class Lecturer:
    id: int
    capacity: int
    prefs: tuple[int, ...]


@dataclass(frozen=True)
class Instance:
    students: tuple[Student, ...]
    projects: tuple[Project, ...]
    lecturers: tuple[Lecturer, ...]

    def __post_init__(self):
        object.__setattr__(self, "students", tuple(self.students))
        object.__setattr__(self, "projects", tuple(self.projects))
        object.__setattr__(self, "lecturers", tuple(self.lecturers))
        _validate(self)

    @property
    def n1(self) -> int:
        return len(self.students)

    @property
    def n2(self) -> int:
        return len(self.projects)

    @property
    def n3(self) -> int:
        return len(self.lecturers)

    def student(self, i: int) -> Student:
        return self.students[i - 1]

    def project(self, j: int) -> Project:
        return self.projects[j - 1]

    def lecturer(self, k: int) -> Lecturer:
        return self.lecturers[k - 1]

    def lecturer_of(self, j: int) -> int:
        return self.projects[j - 1].lecturer

    def offered(self, k: int) -> tuple[int, ...]:
        """P_k in lecturer k's preference order."""
        return self.lecturers[k - 1].prefs

    @cached_property
    def _student_ranks(self) -> tuple[dict[int, int], ...]:
        return tuple({p: r for r, p in enumerate(s.prefs, 1)} for s in self.students)

    @cached_property
    def _lecturer_ranks(self) -> dict[int, int]:
        # projects partition across lecturers, so one map covers every list
        return {p: r for lec in self.lecturers for r, p in enumerate(lec.prefs, 1)}

    def acceptable(self, i: int, j: int) -> bool:
        return j in self._student_ranks[i - 1]

    def acceptable_pairs(self) -> Iterator[tuple[int, int]]:
        """All (student, project) acceptable pairs, by student then list position."""
        for s in self.students:
            for p in s.prefs:
                yield s.id, p


def _validate(inst: Instance) -> None:
    n2, n3 = len(inst.projects), len(inst.lecturers)
    if not inst.students:
        raise InstanceError("instance has no students")
    for pos, s in enumerate(inst.students, 1):
        if s.id != pos:
            raise InstanceError(f"student ids must be dense: expected s{pos}, got s{s.id}")
        if not s.prefs:
            raise InstanceError(f"empty preference list for s{s.id}")
        if len(set(s.prefs)) != len(s.prefs):
            raise InstanceError(f"duplicate project in preference list of s{s.id}")
        for p in s.prefs:
            if not 1 <= p <= n2:
                raise InstanceError(f"s{s.id} references unknown project p{p}")
    for pos, p in enumerate(inst.projects, 1):
        if p.id != pos:
            raise InstanceError(f"project ids must be dense: expected p{pos}, got p{p.id}")
        if p.capacity < 1:
            raise InstanceError(f"project p{p.id} has non-positive capacity {p.capacity}")
        if not 1 <= p.lecturer <= n3:
            raise InstanceError(f"project p{p.id} offered by unknown lecturer l{p.lecturer}")
    owner: dict[int, int] = {}
    for pos, lec in enumerate(inst.lecturers, 1):
        if lec.id != pos:
            raise InstanceError(f"lecturer ids must be dense: expected l{pos}, got l{lec.id}")
        if lec.capacity < 1:
            raise InstanceError(f"lecturer l{lec.id} has non-positive capacity {lec.capacity}")
        if not lec.prefs:
            raise InstanceError(f"lecturer l{lec.id} offers no project")
        if len(set(lec.prefs)) != len(lec.prefs):
            raise InstanceError(f"duplicate project in preference list of l{lec.id}")
        for p in lec.prefs:
            if not 1 <= p <= n2:
                raise InstanceError(f"l{lec.id} references unknown project p{p}")
            if p in owner:
                raise InstanceError(f"project offered by two lecturers: p{p} (l{owner[p]}, l{lec.id})")
            owner[p] = lec.id
    for p in inst.projects:
        if owner.get(p.id) != p.lecturer:
            raise InstanceError(
                f"lecturer l{p.lecturer} must rank exactly the projects it offers (p{p.id} missing)"
            )


def build_instance(
    student_prefs: Iterable[Iterable[int]],
    project_caps: Iterable[int],
    lecturer_caps: Iterable[int],
    lecturer_prefs: Iterable[Iterable[int]],
) -> Instance:
    """Convenience constructor from plain lists (index 0 is s1/p1/l1)."""
    lecturer_prefs = [tuple(x) for x in lecturer_prefs]
    owner = {p: k for k, prefs in enumerate(lecturer_prefs, 1) for p in prefs}
    projects = tuple(Project(j, c, owner.get(j, 0)) for j, c in enumerate(project_caps, 1))
    lecturers = tuple(
        Lecturer(k, d, prefs) for k, (d, prefs) in enumerate(zip(lecturer_caps, lecturer_prefs), 1)
    )
    students = tuple(Student(i, tuple(prefs)) for i, prefs in enumerate(student_prefs, 1))
    return Instance(students, projects, lecturers)


class Matching:
    """Immutable partial map student id -> project id.

    Capacity feasibility is not enforced here; see
    :func:`spap.stability.check_feasible`.
    """

    __slots__ = ("_assign", "_hash")

    def __init__(self, pairs: Mapping[int, int] | Iterable[tuple[int, int]] = ()):
        items = pairs.items() if isinstance(pairs, Mapping) else pairs
        assign: dict[int, int] = {}
        for s, p in items:
            s, p = int(s), int(p)
            if s in assign:
                raise ValueError(f"student s{s} assigned twice")
            assign[s] = p
        self._assign = dict(sorted(assign.items()))
        self._hash = None

    @classmethod
    def from_vector(cls, vec: Iterable[int]) -> Matching:
        """Build from a per-student vector of project ids (0 = unassigned)."""
        return cls((i, p) for i, p in enumerate(vec, 1) if p)

    @property
    def assignment(self) -> Mapping[int, int]:
        return MappingProxyType(self._assign)

    def project_of(self, s: int) -> int | None:
        return self._assign.get(s)

    def pairs(self) -> list[tuple[int, int]]:
        return list(self._assign.items())

    def vector(self, n1: int) -> tuple[int, ...]:
        return tuple(self._assign.get(i, 0) for i in range(1, n1 + 1))

    def students_of(self, p: int) -> list[int]:
        return [s for s, q in self._assign.items() if q == p]

    def project_counts(self, inst: Instance) -> list[int]:
        """|M(p_j)| indexed by j-1."""
        counts = [0] * inst.n2
        for p in self._assign.values():
            counts[p - 1] += 1
        return counts

    def lecturer_counts(self, inst: Instance) -> list[int]:
        """|M(l_k)| indexed by k-1."""
        counts = [0] * inst.n3
        for p in self._assign.values():
            counts[inst.lecturer_of(p) - 1] += 1
        return counts

    def with_assignment(self, updates: Mapping[int, int]) -> Matching:
        new = dict(self._assign)
        new.update(updates)
        return Matching(new)

    def __len__(self) -> int:
        return len(self._assign)

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(self._assign.items())

    def __contains__(self, pair) -> bool:
        s, p = pair
        return self._assign.get(s) == p

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matching):
            return NotImplemented
        return self._assign == other._assign

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(tuple(self._assign.items()))
        return self._hash

    def __repr__(self) -> str:
        body = ", ".join(f"(s{s}, p{p})" for s, p in self._assign.items())
        return f"Matching({{{body}}})"

    def literal(self) -> str:
        """Space separated ``i:j`` pairs, the format accepted by ``spap check``."""
        return " ".join(f"{s}:{p}" for s, p in self._assign.items())


def parse_matching(text: str) -> Matching:
    pairs = []
    for tok in text.split():
        s, sep, p = tok.partition(":")
        if not sep:
            raise ValueError(f"bad matching token {tok!r}, expected i:j")
        pairs.append((int(s.lstrip("sS")), int(p.lstrip("pP"))))
    return Matching(pairs)


# ---------------------------------------------------------------------------
# ranks and preference-derived index sets


def rank_student(inst: Instance, s: int, p: int) -> int:
    try:
        return inst._student_ranks[s - 1][p]
    except KeyError:
        raise NotAcceptableError(f"p{p} is not acceptable to s{s}") from None


def rank_lecturer(inst: Instance, l: int, p: int) -> int:
    if not 1 <= p <= inst.n2 or inst.lecturer_of(p) != l:
        raise NotOfferedError(f"p{p} is not offered by l{l}")
    return inst._lecturer_ranks[p]


def prefers_student(inst: Instance, s: int, p: int, q: int | None) -> bool:
    """True if s prefers p to q; any acceptable project beats ``None``."""
    ranks = inst._student_ranks[s - 1]
    if q is None:
        return p in ranks
    return ranks[p] < ranks[q]


@dataclass(frozen=True)
class PrefSets:
    """S_{i,j}, T_{k,j} and D_{k,j} keyed by (i, j) and (k, j)."""

    S: Mapping[tuple[int, int], frozenset[int]] = field(repr=False)
    T: Mapping[tuple[int, int], frozenset[int]] = field(repr=False)
    D: Mapping[tuple[int, int], frozenset[int]] = field(repr=False)


def pref_sets(inst: Instance) -> PrefSets:
    S = {}
    for s in inst.students:
        for r, p in enumerate(s.prefs):
            S[s.id, p] = frozenset(s.prefs[: r + 1])
    T, D = {}, {}
    for lec in inst.lecturers:
        for r, p in enumerate(lec.prefs):
            D[lec.id, p] = frozenset(lec.prefs[: r + 1])
            T[lec.id, p] = frozenset(lec.prefs[r + 1 :])
    return PrefSets(MappingProxyType(S), MappingProxyType(T), MappingProxyType(D))


# ---------------------------------------------------------------------------
# text format


def parse_instance(text: str | TextIO) -> Instance:
    """Parse the line-oriented ``.spa`` instance format.

    ::

        n1 n2 n3
        P <j> <c_j> <k>          (n2 lines)
        L <k> <d_k> : <projects> (n3 lines)
        S <i> : <projects>       (n1 lines)

    ``#`` starts a comment.  Raises :class:`InstanceError` carrying the
    offending line number for syntax errors.
    """
    if not isinstance(text, str):
        text = text.read()
    lines = []
    for num, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].strip()
        if body:
            lines.append((num, body))
    if not lines:
        raise InstanceError("empty instance file")

    num, header = lines[0]
    try:
        n1, n2, n3 = (int(t) for t in header.split())
    except ValueError:
        raise InstanceError("header must be 'n1 n2 n3'", num) from None
    if min(n1, n2, n3) < 1:
        raise InstanceError("counts must be positive", num)

    caps: dict[int, int] = {}
    owners: dict[int, int] = {}
    lcaps: dict[int, int] = {}
    lprefs: dict[int, tuple[int, ...]] = {}
    sprefs: dict[int, tuple[int, ...]] = {}
    expected = n1 + n2 + n3
    if len(lines) - 1 != expected:
        raise InstanceError(f"expected {expected} body lines, found {len(lines) - 1}")

    def ints(tokens, num):
        try:
            return [int(t) for t in tokens]
        except ValueError:
            raise InstanceError(f"non-integer token in {' '.join(tokens)!r}", num) from None

    for num, body in lines[1:]:
        tag, _, rest = body.partition(" ")
        tag = tag.upper()
        if tag == "P":
            vals = ints(rest.split(), num)
            if len(vals) != 3:
                raise InstanceError("project line must be 'P <j> <c_j> <k>'", num)
            j, c, k = vals
            _check_index("project", j, n2, caps, num)
            caps[j], owners[j] = c, k
        elif tag in ("L", "S"):
            head, sep, tail = rest.partition(":")
            if not sep:
                raise InstanceError(f"missing ':' in {tag} line", num)
            head_vals = ints(head.split(), num)
            prefs = tuple(ints(tail.split(), num))
            if tag == "L":
                if len(head_vals) != 2:
                    raise InstanceError("lecturer line must be 'L <k> <d_k> : <projects>'", num)
                k, d = head_vals
                _check_index("lecturer", k, n3, lcaps, num)
                lcaps[k], lprefs[k] = d, prefs
            else:
                if len(head_vals) != 1:
                    raise InstanceError("student line must be 'S <i> : <projects>'", num)
                (i,) = head_vals
                _check_index("student", i, n1, sprefs, num)
                sprefs[i] = prefs
        else:
            raise InstanceError(f"unknown line tag {tag!r}", num)

    for name, seen, n in (("project", caps, n2), ("lecturer", lcaps, n3), ("student", sprefs, n1)):
        if len(seen) != n:
            raise InstanceError(f"expected {n} {name} lines, found {len(seen)}")

    return Instance(
        tuple(Student(i, sprefs[i]) for i in range(1, n1 + 1)),
        tuple(Project(j, caps[j], owners[j]) for j in range(1, n2 + 1)),
        tuple(Lecturer(k, lcaps[k], lprefs[k]) for k in range(1, n3 + 1)),
    )


def _check_index(kind, idx, n, seen, num):
    if not 1 <= idx <= n:
        raise InstanceError(f"{kind} index {idx} out of range 1..{n}", num)
    if idx in seen:
        raise InstanceError(f"duplicate {kind} {idx}", num)


def serialize_instance(inst: Instance) -> str:
    out = io.StringIO()
    out.write(f"{inst.n1} {inst.n2} {inst.n3}\n")
    for p in inst.projects:
        out.write(f"P {p.id} {p.capacity} {p.lecturer}\n")
    for lec in inst.lecturers:
        out.write(f"L {lec.id} {lec.capacity} : {' '.join(map(str, lec.prefs))}\n")
    for s in inst.students:
        out.write(f"S {s.id} : {' '.join(map(str, s.prefs))}\n")
    return out.getvalue()


def read_instance(path) -> Instance:
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh)


def write_instance(inst: Instance, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize_instance(inst))
