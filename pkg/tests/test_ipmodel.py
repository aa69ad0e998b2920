import numpy as np
import pytest
from scipy.optimize import Bounds, LinearConstraint, milp

from spap.instances import GenParams, generate
from spap.ipmodel import (
    NonIntegralSolutionError, build_model, export_lp, extract_matching, model_arrays, solution_from_matching,
)
from spap.model import Matching
from spap.solvers import enumerate_stable, max_stable_oracle
from spap.stability import find_blocking_pairs, is_stable


def small(seed, n1=6):
    return generate(GenParams(n1=n1, pref_max=min(5, n1 // 2), seed=seed))


def solve_with_milp(model, inst):
    """Optimise the model with scipy's HiGHS MILP solver; returns (objective, values)."""
    arr = model_arrays(model, inst)
    names = list(model.variables)
    nrows = len(arr.row_rhs)
    a = np.zeros((nrows, arr.nvars))
    for r in range(nrows):
        for t in range(arr.row_ptr[r], arr.row_ptr[r + 1]):
            a[r, arr.row_idx[t]] += arr.row_coef[t]
    c = np.array([-1.0 if n.startswith("x_") else 0.0 for n in names])
    lb = np.array([model.variables[n].lb for n in names], dtype=float)
    ub = np.array([model.variables[n].ub for n in names], dtype=float)
    res = milp(c, constraints=LinearConstraint(a, -np.inf, arr.row_rhs), bounds=Bounds(lb, ub),
               integrality=np.ones(len(names)))
    assert res.success
    return round(-res.fun), dict(zip(names, np.round(res.x)))


def test_census_worked_instance(worked):
    census = build_model(worked, with_coalition=True).census()
    assert (census["X"], census["Lambda"], census["Delta"], census["H"], census["E"], census["V"]) == (6, 3, 2, 3, 6, 3)
    assert sum(census[k] for k in ("X", "Lambda", "Delta", "H", "E", "V")) == 23
    rows = [census[f"rows{f}"] for f in range(1, 12)]
    assert rows == [3, 3, 2, 3, 6, 2, 6, 3, 6, 4, 6]


def test_census_without_coalition(worked):
    model = build_model(worked, with_coalition=False)
    assert len(model.variables) == 14
    census = model.census()
    assert census["E"] == census["V"] == census["rows10"] == census["rows11"] == 0


@pytest.mark.parametrize("seed", range(25))
def test_census_formulas(seed):
    inst = generate(GenParams(n1=10 + seed, seed=seed))
    c = build_model(inst).census()
    n1, n2, n3 = inst.n1, inst.n2, inst.n3
    x = sum(len(s.prefs) for s in inst.students)
    assert (c["X"], c["Lambda"], c["Delta"], c["H"], c["E"], c["V"]) == (x, n2, n3, n2, n1 * (n1 - 1), n1)
    assert c["rows1"] == n1 and c["rows2"] == n2 and c["rows3"] == n3
    assert c["rows4"] == n2 and c["rows6"] == n3 and c["rows8"] == n2
    assert c["rows5"] == c["rows7"] == c["rows9"] == x
    assert c["rows11"] == n1 * (n1 - 1)
    # (10): ordered student pairs with j' in A_i and A_i', j' above j on s_i's list
    expect10 = 0
    for s in inst.students:
        for t in inst.students:
            if s.id != t.id:
                expect10 += sum(len(s.prefs) - 1 - r for r, jp in enumerate(s.prefs) if jp in t.prefs)
    assert c["rows10"] == expect10


def test_single_pair_forced(single):
    model = build_model(single)
    (row5,) = model.family(5)
    # theta = 1 - x and gamma = 0 (nothing ranked below p1): -x + alpha <= 1
    assert dict((v, c) for c, v in row5.terms) == {"x_1_1": -1, "alpha_1": 1}
    assert row5.rhs == 1
    # the empty matching is ruled out by the 1(b) and 1(c) rows
    empty = solution_from_matching(model, single, Matching())
    assert [c.family for c in model.violated(empty)] == [7, 9]
    obj, values = solve_with_milp(model, single)
    assert obj == 1 and values["x_1_1"] == 1


def test_lp_export_rows(worked):
    text = export_lp(build_model(worked, with_coalition=False))
    assert " f2_p3: x_1_3 + x_3_3 <= 1\n" in text
    assert " obj: x_1_3 + x_1_2 + x_1_1 + x_2_1 + x_2_2 + x_3_3\n" in text
    for head in ("Maximize", "Subject To", "Bounds", "Binary", "End"):
        assert f"\n{head}\n" in text
    assert "General" not in text


def test_lp_export_coalition_sections(worked):
    text = export_lp(build_model(worked))
    assert " 1 <= v_1 <= 3\n" in text
    assert "General\n v_1\n v_2\n v_3\n" in text
    assert " f11_s1_s2: v_1 - v_2 + 3 e_1_2 <= 2\n" in text


def test_lp_export_family_order(worked):
    text = export_lp(build_model(worked))
    fams = [int(line.split("_")[0][2:]) for line in text.splitlines() if line.startswith(" f")]
    assert fams == sorted(fams)


def test_lp_export_deterministic(worked):
    assert export_lp(build_model(worked)) == export_lp(build_model(worked))
    inst = generate(GenParams(n1=30, seed=3))
    assert export_lp(build_model(inst)) == export_lp(build_model(generate(GenParams(n1=30, seed=3))))


def test_lp_export_long_rows_wrap():
    inst = generate(GenParams(n1=60, seed=1))
    text = export_lp(build_model(inst))
    assert max(len(line) for line in text.splitlines()) <= 200


def test_extract_examples(worked):
    model = build_model(worked)
    m = extract_matching(model, {"x_1_2": 1, "x_2_1": 1, "x_3_3": 1})
    assert m == Matching({1: 2, 2: 1, 3: 3}) and len(m) == 3
    assert len(extract_matching(model, {})) == 0
    with pytest.raises(NonIntegralSolutionError):
        extract_matching(model, {"x_1_3": 0.5})


def test_strict_label_encoding():
    # v_i + 1 <= v_ip + n1 (1 - e) over integers is the strict form v_i < v_ip when e = 1
    n1 = 5
    for vi in range(1, n1 + 1):
        for vj in range(1, n1 + 1):
            for e in (0, 1):
                integer_form = vi + 1 <= vj + n1 * (1 - e)
                strict_form = (vi < vj) if e else True
                assert integer_form == strict_form


@pytest.mark.parametrize("seed", range(30))
def test_induced_solution_satisfies_rows(seed):
    inst = small(seed, 5 + seed % 4)
    with_c, without_c = build_model(inst), build_model(inst, with_coalition=False)
    for m in enumerate_stable(inst):
        for model in (with_c, without_c):
            values = solution_from_matching(model, inst, m)
            assert model.violated(values) == []
            assert model.objective_value(values) == len(m)
            assert extract_matching(model, values) == m


def test_unstable_matchings_violate_rows(worked):
    model = build_model(worked)
    # M2 has a coalition: rows (10)-(11) cannot all hold for any labelling
    m2 = Matching({1: 1, 2: 2, 3: 3})
    assert model.violated(solution_from_matching(model, worked, m2))
    obj, _ = solve_with_milp(model, worked)
    assert obj == 3


@pytest.mark.parametrize("seed", range(20))
def test_milp_optimum_matches_oracle(seed):
    inst = small(seed, 6)
    opt = max_stable_oracle(inst).size
    model = build_model(inst)
    obj, values = solve_with_milp(model, inst)
    assert obj == opt
    assert is_stable(inst, extract_matching(model, values)).stable
    # without coalition rows every solution is at least blocking-pair free
    lean = build_model(inst, with_coalition=False)
    obj2, values2 = solve_with_milp(lean, inst)
    assert obj2 == opt
    assert find_blocking_pairs(inst, extract_matching(lean, values2)) == []
