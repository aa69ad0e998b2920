"""Shared fixtures: the three-student worked instance and an oracle-solved corpus."""

from __future__ import annotations

import functools
import sys
import time

import pytest

from spap.instances import GenParams, generate
from spap.model import build_instance, parse_instance
from spap.solvers import max_stable_oracle

WORKED_TEXT = """\
# three students, three unit-capacity projects, two lecturers
3 3 2
P 1 1 1
P 2 1 1
P 3 1 2
L 1 2 : 2 1
L 2 1 : 3
S 1 : 3 2 1
S 2 : 1 2
S 3 : 3
"""

CORPUS_SIZE = 500
BUILD_SECONDS: dict[tuple[int, int], float] = {}  # oracle time per corpus


@pytest.fixture
def worked():
    return parse_instance(WORKED_TEXT)


@pytest.fixture
def single():
    return build_instance([[1]], [1], [1], [[1]])


def params_for(n1: int, seed: int) -> GenParams:
    """Generator defaults, with the list length capped by the project count at tiny n1."""
    return GenParams(n1=n1, pref_max=min(5, n1 // 2), seed=seed)


@functools.lru_cache(maxsize=None)
def corpus(n1: int = 10, count: int = CORPUS_SIZE) -> tuple:
    """(instance, oracle optimum) for seeds 0 .. count-1."""
    t0 = time.perf_counter()
    out = []
    for seed in range(count):
        inst = generate(params_for(n1, seed))
        out.append((inst, max_stable_oracle(inst).size))
    BUILD_SECONDS[n1, count] = time.perf_counter() - t0
    return tuple(out)


@pytest.fixture(scope="session")
def oracle_corpus():
    return corpus()


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        ok, detail = results[n]
        terminalreporter.write_line(f"CRITERION {n}: {'PASS' if ok else 'FAIL'} - {detail}")
