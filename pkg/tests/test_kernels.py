"""The scalar-loop and numpy kernel bodies agree with each other and with the
definition-level reference; solver results do not depend on the backend."""

import itertools
import os
import random
import subprocess
import sys

import numpy as np
import pytest

from spap import _kernels as K
from spap.instances import GenParams, generate
from spap.ipmodel import build_model, model_arrays
from spap.model import Matching
from spap.stability import find_blocking_pairs

import reference as ref

TYPES = {1: "1a", 2: "1b", 3: "1c"}


def small(seed, n1=8):
    return generate(GenParams(n1=n1, pref_max=min(5, n1 // 2), seed=seed))


def state(inst, a, vec, depth):
    """Kernel arrays for students 1..depth+1 fixed as in ``vec``."""
    n1 = inst.n1
    assign = np.array([p - 1 for p in vec], dtype=np.int64)
    choice = np.array([inst.students[i].prefs.index(p) if p else len(inst.students[i].prefs)
                       for i, p in enumerate(vec)], dtype=np.int64)
    pcount = np.zeros(inst.n2, dtype=np.int64)
    lcount = np.zeros(inst.n3, dtype=np.int64)
    remp = np.zeros(inst.n2, dtype=np.int64)
    reml = np.zeros(inst.n3, dtype=np.int64)
    for i in range(n1):
        if i <= depth:
            if assign[i] >= 0:
                pcount[assign[i]] += 1
                lcount[a.plect[assign[i]]] += 1
        else:
            assign[i] = -1
            choice[i] = -1
            for t in range(a.plen[i]):
                remp[a.pref[i, t]] += 1
            for t in range(a.sdlen[i]):
                reml[a.sdl[i, t]] += 1
    return assign, choice, pcount, lcount, remp, reml


def random_feasible(inst, rng):
    while True:
        vec = tuple(rng.choice((0,) + s.prefs) for s in inst.students)
        if ref.feasible(inst, vec):
            return vec


def test_backend_reported():
    assert K.backend() in ("numba", "numpy")


@pytest.mark.parametrize("seed", range(30))
def test_blocking_scan_and_cycle_kernels(seed):
    inst = small(seed)
    a = K.pack_instance(inst)
    rng = random.Random(seed)
    worst = np.zeros(inst.n3, dtype=np.int64)
    for _ in range(30):
        vec = random_feasible(inst, rng)
        assign, _, pcount, lcount, _, _ = state(inst, a, vec, inst.n1 - 1)
        K._worst_numpy(a.plect, a.lrank, pcount, worst)
        args = (a.pref, a.plen, a.plect, a.pcap, a.lcap, a.lrank, assign, pcount, lcount, worst)
        loop = K.blocking_scan_loop(*args)
        assert tuple(map(int, K._blocking_scan_numpy(*args))) == tuple(map(int, loop))
        assert tuple(map(int, K.blocking_scan(*args))) == tuple(map(int, loop))
        bps = find_blocking_pairs(inst, Matching.from_vector(vec))
        if bps:
            first = bps[0]
            assert (loop[0] + 1, loop[1] + 1, TYPES[int(loop[2])]) == (first.student, first.project, first.type)
        else:
            assert loop[0] == -1
        cyc = ref.has_cycle(ref.envy_arcs(inst, vec))
        assert K.envy_has_cycle_loop(a.srank, assign) == cyc
        assert K._envy_has_cycle_numpy(a.srank, assign) == cyc
        assert bool(K.envy_has_cycle(a.srank, assign)) == cyc


@pytest.mark.parametrize("seed", range(20))
def test_leaf_feasibility_kernels(seed):
    inst = small(seed)
    a = K.pack_instance(inst)
    rng = random.Random(seed)
    for with_coalition in (True, False):
        model = build_model(inst, with_coalition)
        m = model_arrays(model, inst)
        z = np.zeros(m.nvars, dtype=np.int64)
        for _ in range(25):
            vec = random_feasible(inst, rng)
            assign, choice, *_ = state(inst, a, vec, inst.n1 - 1)
            args = (assign, choice, m.row_ptr, m.row_idx, m.row_coef, m.row_rhs, m.xidx,
                    m.aux_vars, m.aux_ptr, m.aux_rows, m.e_vars, m.e_src, m.e_dst, m.v_vars, z)
            expect = ref.stable(inst, vec) if with_coalition else not ref.blocking(inst, vec)
            assert K.leaf_feasible_loop(*args) == expect
            assert K._leaf_feasible_numpy(*args) == expect
            assert bool(K.leaf_feasible(*args)) == expect


def completions_blocked(inst, vec, depth):
    """True if every feasible completion of the first depth+1 students has a blocking pair."""
    rest = [(0,) + s.prefs for s in inst.students[depth + 1:]]
    for tail in itertools.product(*rest):
        full = tuple(vec[: depth + 1]) + tail
        if ref.feasible(inst, full) and not ref.blocking(inst, full):
            return False
    return True


def lookahead_cases(seed):
    """Check doomed-state detection on random partial states; returns how often it fired."""
    inst = small(seed, 6)
    a = K.pack_instance(inst)
    rng = random.Random(seed)
    worst = np.zeros(inst.n3, dtype=np.int64)
    fired = 0
    for _ in range(30):
        vec = random_feasible(inst, rng)
        depth = rng.randrange(inst.n1)
        assign, choice, pcount, lcount, remp, reml = state(inst, a, vec, depth)
        args = (depth, a.pref, a.plen, a.plect, a.pcap, a.lcap, a.lrank, assign, choice,
                pcount, lcount, remp, reml, worst)
        loop = bool(K.doomed_loop(*args))
        assert bool(K._doomed_numpy(*args)) == loop
        assert bool(K.doomed(*args)) == loop
        if loop:
            fired += 1
            assert completions_blocked(inst, vec, depth)
    return fired


def test_lookahead_is_sound_and_fires():
    # soundness on every state, and the check is only meaningful if it fires
    assert sum(lookahead_cases(seed) for seed in range(25)) > 100


ENV_SCRIPT = """
import json
from spap.instances import GenParams, generate
from spap.solvers import max_stable_oracle, solve_exact
from spap import _kernels
out = {"backend": _kernels.backend(), "sizes": []}
for seed in range(8):
    inst = generate(GenParams(n1=8, pref_max=4, seed=seed))
    out["sizes"].append([max_stable_oracle(inst).size,
                         solve_exact(inst, warm_start=False, flow_bound=False).size,
                         solve_exact(inst, "with-coalition", warm_start=False, flow_bound=False).size])
print(json.dumps(out))
"""


def run_backend(disable: bool):
    env = dict(os.environ)
    env["SPAP_DISABLE_NUMBA"] = "1" if disable else "0"
    out = subprocess.run([sys.executable, "-c", ENV_SCRIPT], env=env, capture_output=True, text=True, check=True)
    import json
    return json.loads(out.stdout)


def test_backends_agree():
    fast, slow = run_backend(False), run_backend(True)
    assert slow["backend"] == "numpy"
    assert fast["sizes"] == slow["sizes"]
    assert all(len(set(row)) == 1 for row in fast["sizes"])
