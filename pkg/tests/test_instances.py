import pytest
from hypothesis import given, settings, strategies as st

from spap.instances import (
    COHORT_SHAPES, GenParams, derive_lecturer_prefs, generate, popularity, standin_params,
)
from spap.model import build_instance, parse_instance, serialize_instance


def check_generated(inst, params):
    lo, hi = params.length_range
    assert (inst.n1, inst.n2, inst.n3) == (params.n1, params.projects, params.lecturers)
    assert sum(p.capacity for p in inst.projects) == params.capacity
    assert all(p.capacity >= 1 for p in inst.projects)
    for lec in inst.lecturers:
        caps = [inst.project(p).capacity for p in lec.prefs]
        assert lec.prefs and max(caps) <= lec.capacity <= sum(caps)
    for s in inst.students:
        assert lo <= len(s.prefs) <= hi and len(set(s.prefs)) == len(s.prefs)
    # passes parser validation too
    assert parse_instance(serialize_instance(inst)) == inst


def test_defaults_at_hundred():
    inst = generate(GenParams(n1=100, seed=0))
    assert (inst.n2, inst.n3) == (50, 20)
    assert sum(p.capacity for p in inst.projects) == 110


@settings(max_examples=1000, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_small_instances_over_many_seeds(seed):
    params = GenParams(n1=10, pref_min=2, pref_max=5, seed=seed)
    check_generated(generate(params), params)


@pytest.mark.parametrize("n1", [10, 37, 100, 250])
def test_larger_sizes(n1):
    for seed in range(5):
        params = GenParams(n1=n1, seed=seed)
        check_generated(generate(params), params)


def test_exact_length():
    inst = generate(GenParams(n1=10, pref_len=3, seed=1))
    assert {len(s.prefs) for s in inst.students} == {3}


def test_same_seed_same_bytes():
    a = serialize_instance(generate(GenParams(n1=80, seed=11)))
    b = serialize_instance(generate(GenParams(n1=80, seed=11)))
    c = serialize_instance(generate(GenParams(n1=80, seed=12)))
    assert a == b and a != c


@pytest.mark.parametrize("params, msg", [
    (GenParams(n1=10, pref_len=6), "exceeds project count"),
    (GenParams(n1=4), "no lecturers"),
    (GenParams(n1=10, pref_min=4, pref_max=3), "bad preference length"),
    (GenParams(n1=10, capacity_ratio=0.0), "ratios must be positive"),
    (GenParams(n1=8), "exceeds project count"),
])
def test_parameter_errors(params, msg):
    with pytest.raises(ValueError, match=msg):
        generate(params)


def test_popularity_worked(worked):
    assert popularity(worked) == [2, 2, 2]
    assert derive_lecturer_prefs(worked, "ascending").lecturer(1).prefs == (1, 2)
    assert derive_lecturer_prefs(worked, "descending").lecturer(1).prefs == (1, 2)


def test_popularity_orders():
    inst = build_instance([[1, 2], [2, 3], [2]], [1, 1, 1], [1], [[1, 2, 3]])
    # a = (1, 3, 1)
    assert derive_lecturer_prefs(inst, "ascending").lecturer(1).prefs == (1, 3, 2)
    assert derive_lecturer_prefs(inst, "descending").lecturer(1).prefs == (2, 1, 3)


def test_single_project_lecturer_unchanged(worked):
    for mode in ("random", "ascending", "descending"):
        assert derive_lecturer_prefs(worked, mode, seed=3).lecturer(2).prefs == (3,)


@pytest.mark.parametrize("seed", range(20))
def test_derive_permutes_each_list(seed):
    inst = generate(GenParams(n1=40, seed=seed))
    for mode in ("random", "ascending", "descending"):
        out = derive_lecturer_prefs(inst, mode, seed)
        assert out.students == inst.students and out.projects == inst.projects
        for a, b in zip(inst.lecturers, out.lecturers):
            assert sorted(a.prefs) == sorted(b.prefs) and a.capacity == b.capacity


def test_unknown_mode(worked):
    with pytest.raises(ValueError):
        derive_lecturer_prefs(worked, "sideways")


@pytest.mark.parametrize("year", sorted(COHORT_SHAPES))
def test_standin_shapes(year):
    n1, n2, n3, length = COHORT_SHAPES[year]
    inst = generate(standin_params(year))
    assert (inst.n1, inst.n2, inst.n3) == (n1, n2, n3)
    assert all(p.capacity == 1 for p in inst.projects)
    assert {len(s.prefs) for s in inst.students} == {length}
