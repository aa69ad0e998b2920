"""Experiment runner: exact solver versus the approximation algorithms.

Algorithm labels in reports:

  A  exact optimum (branch and bound)
  B  3/2-approximation, best of R runs
  C  3/2-approximation, single run
  D  2-approximation, best of R runs
  E  2-approximation, single run

The single run uses the first of the R seeds, so B >= C and D >= E hold on
every instance, not just on average.  A is seeded with the larger of B and
D, so A >= B and A >= D hold even when the exact search runs out of budget.
"""

from __future__ import annotations

import csv
import io
import math
import statistics
import time
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .approx import ApproxConfig, best_of_runs
from .instances import POPULARITY_MODES, COHORT_SHAPES, GenParams, derive_lecturer_prefs, generate, standin_params
from .model import Instance, Matching
from .solvers import MODES, BudgetExceeded, solve_exact
from .stability import is_stable

CSV_HEADER = ("experiment", "n1", "n2", "n3", "pref_len", "seed", "mode", "algo",
              "size", "opt", "ratio", "time_ms", "nodes")
ALGOS = ("A", "B", "C", "D", "E")


@dataclass(frozen=True)
class Budget:
    max_nodes: int | None = None
    time_limit: float | None = None


@dataclass(frozen=True)
class ReportRow:
    experiment: int
    n1: int
    n2: int
    n3: int
    pref_len: str
    seed: int
    mode: str
    algo: str
    size: int
    opt: int | None = None  # None when the exact search hit its budget
    time_ms: float = 0.0
    nodes: int | None = None

    @property
    def ratio(self) -> float | None:
        if self.opt is None:
            return None
        return 1.0 if self.opt == 0 else self.size / self.opt

    def as_csv(self) -> list[str]:
        def fmt(v):
            return "" if v is None else str(v)

        ratio = self.ratio
        return [
            str(self.experiment), str(self.n1), str(self.n2), str(self.n3), self.pref_len,
            str(self.seed), self.mode, self.algo, str(self.size), fmt(self.opt),
            "" if ratio is None else f"{ratio:.6f}", f"{self.time_ms:.3f}", fmt(self.nodes),
        ]

    @classmethod
    def from_csv(cls, rec: dict) -> "ReportRow":
        def opt_int(v):
            return None if v == "" else int(v)

        return cls(
            experiment=int(rec["experiment"]), n1=int(rec["n1"]), n2=int(rec["n2"]), n3=int(rec["n3"]),
            pref_len=rec["pref_len"], seed=int(rec["seed"]), mode=rec["mode"], algo=rec["algo"],
            size=int(rec["size"]), opt=opt_int(rec["opt"]), time_ms=float(rec["time_ms"]),
            nodes=opt_int(rec["nodes"]),
        )


@dataclass
class ExperimentReport:
    rows: list[ReportRow] = field(default_factory=list)

    def __len__(self):
        return len(self.rows)

    def extend(self, rows: Iterable[ReportRow]) -> None:
        self.rows.extend(rows)

    def select(self, **where) -> list[ReportRow]:
        return [r for r in self.rows if all(getattr(r, k) == v for k, v in where.items())]

    def to_csv(self, stream=None) -> str:
        out = stream if stream is not None else io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in self.rows:
            w.writerow(r.as_csv())
        return out.getvalue() if stream is None else ""

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            self.to_csv(fh)

    @classmethod
    def from_csv(cls, text: str) -> "ExperimentReport":
        reader = csv.DictReader(io.StringIO(text))
        if tuple(reader.fieldnames or ()) != CSV_HEADER:
            raise ValueError(f"unexpected CSV header {reader.fieldnames}")
        return cls([ReportRow.from_csv(rec) for rec in reader])

    def summary(self) -> list[dict]:
        """Means per (experiment, n1, pref_len, mode, algo), in first-seen order."""
        groups: dict[tuple, list[ReportRow]] = {}
        for r in self.rows:
            groups.setdefault((r.experiment, r.n1, r.pref_len, r.mode, r.algo), []).append(r)
        out = []
        for (exp, n1, pl, mode, algo), rs in groups.items():
            ratios = [r.ratio for r in rs if r.ratio is not None]
            out.append({
                "experiment": exp, "n1": n1, "pref_len": pl, "mode": mode, "algo": algo,
                "trials": len(rs),
                "budget_limited": sum(r.opt is None for r in rs),
                "mean_size": statistics.fmean(r.size for r in rs),
                "mean_ratio": statistics.fmean(ratios) if ratios else None,
                "sem_ratio": statistics.stdev(ratios) / math.sqrt(len(ratios)) if len(ratios) > 1 else 0.0,
                "min_ratio": min(ratios) if ratios else None,
                "mean_time_ms": statistics.fmean(r.time_ms for r in rs),
            })
        return out

    def format_summary(self) -> str:
        lines = ["exp  n1  pref  mode                 algo trials  size     ratio    time_ms"]
        for s in self.summary():
            ratio = "-" if s["mean_ratio"] is None else f"{s['mean_ratio']:.4f}"
            lines.append(
                f"{s['experiment']:<4} {s['n1']:<3} {s['pref_len']:<5} {s['mode'] or '-':<20} "
                f"{s['algo']:<4} {s['trials']:<6} {s['mean_size']:<8.2f} {ratio:<8} {s['mean_time_ms']:.2f}"
            )
        return "\n".join(lines)


# ---------------------------------------------------------------------------


def _pref_label(inst: Instance) -> str:
    """Observed list lengths, "x" or "lo-hi"."""
    lens = {len(s.prefs) for s in inst.students}
    lo, hi = min(lens), max(lens)
    return str(lo) if lo == hi else f"{lo}-{hi}"


def _verified(inst: Instance, m: Matching, label: str) -> Matching:
    verdict = is_stable(inst, m)
    if not verdict.stable:
        raise RuntimeError(f"{label} returned an unstable matching: {verdict.lines()}")
    return m


def _timed(fn, *args, **kw):
    t0 = time.perf_counter()
    out = fn(*args, **kw)
    return out, (time.perf_counter() - t0) * 1000.0


def five_algorithms(inst: Instance, seed: int, runs: int, budget: Budget, experiment: int,
                    mode: str = "", pref_label: str | None = None) -> list[ReportRow]:
    """Rows A..E for one instance; approximation seeds are seed .. seed + runs - 1."""
    sizes: dict[str, int] = {}
    times: dict[str, float] = {}
    found: dict[str, Matching] = {}
    for algo, fn, r in (("B", "three-halves", runs), ("C", "three-halves", 1),
                        ("D", "two", runs), ("E", "two", 1)):
        m, ms = _timed(best_of_runs, inst, ApproxConfig(fn, r, seed))
        found[algo] = _verified(inst, m, algo)
        sizes[algo], times[algo] = len(m), ms

    seed_m = max(found["B"], found["D"], key=len)
    opt, nodes = None, None
    t0 = time.perf_counter()
    try:
        res = solve_exact(inst, incumbent=seed_m, max_nodes=budget.max_nodes, time_limit=budget.time_limit)
        a_match, opt, nodes = res.matching, res.size, res.nodes_explored
    except BudgetExceeded as exc:
        a_match, nodes = exc.incumbent or seed_m, exc.nodes
    times["A"] = (time.perf_counter() - t0) * 1000.0
    _verified(inst, a_match, "A")
    sizes["A"] = len(a_match)

    base = dict(experiment=experiment, n1=inst.n1, n2=inst.n2, n3=inst.n3,
                pref_len=pref_label or _pref_label(inst), seed=seed, mode=mode)
    return [
        ReportRow(**base, algo=a, size=sizes[a], opt=opt, time_ms=times[a], nodes=nodes if a == "A" else None)
        for a in ALGOS
    ]


def run_experiment_0(sizes: Sequence[int], trials: int, budget: Budget = Budget(), seed: int = 0,
                     pref_range: tuple[int, int] = (2, 5)) -> ExperimentReport:
    """Exact solve with and without the coalition rows on the same instances.

    The flow-bound shortcut is off here so that every solve builds and
    searches its model; the comparison is about the cost of those rows.
    """
    report = ExperimentReport()
    label = f"{pref_range[0]}-{pref_range[1]}"
    for n1 in sizes:
        for t in range(trials):
            s = seed + t
            inst = generate(GenParams(n1=n1, pref_min=pref_range[0], pref_max=pref_range[1], seed=s))
            for mode in MODES:
                t0 = time.perf_counter()
                try:
                    res = solve_exact(inst, mode, max_nodes=budget.max_nodes, time_limit=budget.time_limit,
                                      flow_bound=False)
                    m, opt, nodes = res.matching, res.size, res.nodes_explored
                except BudgetExceeded as exc:
                    m, opt, nodes = exc.incumbent or Matching(()), None, exc.nodes
                ms = (time.perf_counter() - t0) * 1000.0
                _verified(inst, m, mode)
                report.rows.append(ReportRow(0, n1, inst.n2, inst.n3, label, s, mode, "A",
                                             len(m), opt, ms, nodes))
    return report


def run_experiment_1(sizes: Sequence[int], trials: int, runs: int = 100, budget: Budget = Budget(),
                     seed: int = 0, pref_range: tuple[int, int] = (2, 5)) -> ExperimentReport:
    """Five-algorithm comparison across instance sizes."""
    report = ExperimentReport()
    label = f"{pref_range[0]}-{pref_range[1]}"
    for n1 in sizes:
        for t in range(trials):
            s = seed + t
            inst = generate(GenParams(n1=n1, pref_min=pref_range[0], pref_max=pref_range[1], seed=s))
            report.extend(five_algorithms(inst, s, runs, budget, 1, pref_label=label))
    return report


def run_experiment_2(n1: int, lengths: Sequence[int], trials: int, runs: int = 100,
                     budget: Budget = Budget(), seed: int = 0) -> ExperimentReport:
    """Five-algorithm comparison across exact preference-list lengths."""
    for x in lengths:
        GenParams(n1=n1, pref_len=x).validate()
    report = ExperimentReport()
    for x in lengths:
        for t in range(trials):
            s = seed + t
            inst = generate(GenParams(n1=n1, pref_len=x, seed=s))
            report.extend(five_algorithms(inst, s, runs, budget, 2, pref_label=str(x)))
    return report


def standin_instances(years: Iterable[int] = COHORT_SHAPES, seed: int = 0) -> list[tuple[str, Instance]]:
    return [(str(y), generate(standin_params(y, seed))) for y in years]


def run_experiment_3(instances: Sequence[tuple[str, Instance]] | None = None,
                     modes: Sequence[str] = POPULARITY_MODES, runs: int = 100,
                     budget: Budget = Budget(), seed: int = 0) -> ExperimentReport:
    """Five algorithms under each way of deriving lecturer lists from popularity.

    ``instances`` defaults to generated stand-ins shaped like the four
    published datasets.
    """
    if instances is None:
        instances = standin_instances(seed=seed)
    report = ExperimentReport()
    for _, inst in instances:
        for mode in modes:
            derived = derive_lecturer_prefs(inst, mode, seed)
            report.extend(five_algorithms(derived, seed, runs, budget, 3, mode))
    return report


def grid(report: ExperimentReport) -> tuple[list[str], list[list[str]]]:
    """Experiment-3 table: one line per instance, columns mode x algorithm.

    A budget-limited exact size is marked with a trailing ``*``.
    """
    modes = list(dict.fromkeys(r.mode for r in report.rows))
    header = ["n1", "n2", "n3", "l"] + [f"{m}:{a}" for m in modes for a in ALGOS]
    lines: dict[tuple, dict[str, str]] = {}
    for r in report.rows:
        key = (r.n1, r.n2, r.n3, r.pref_len)
        cell = str(r.size) + ("*" if r.algo == "A" and r.opt is None else "")
        lines.setdefault(key, {})[f"{r.mode}:{r.algo}"] = cell
    body = [[str(k) for k in key] + [cells.get(h, "") for h in header[4:]] for key, cells in lines.items()]
    return header, body

