import math
import warnings
from itertools import permutations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tspqpe.errors import AllEdgesMissing, ValidationError
from tspqpe.instance import (
    PhaseWrapWarning,
    TspInstance,
    ZeroCostWarning,
    apply_penalty,
    normalize,
    example_instance,
    validate,
)
from tspqpe.oracle import brute_force_solve, enumerate_tours, tour_cost

PI = math.pi


def all_tour_phases(phi):
    n = phi.shape[0]
    for rest in permutations(range(1, n)):
        order = (0,) + rest
        yield sum(phi[order[i], order[(i + 1) % n]] for i in range(n))


def test_example_matrix_validates(example4):
    assert validate(example4).ok
    assert example4.costs[0, 1] == PI / 2 and example4.costs[2, 3] == PI / 8


def test_zero_2x2_validates():
    assert validate(TspInstance(np.zeros((2, 2)))).ok


def test_negative_cost_reported_one_indexed():
    m = np.zeros((3, 3))
    m[0, 1] = -1
    rep = validate(TspInstance(m))
    assert not rep.ok
    assert "negative cost at (1,2)" in rep.violations


def test_validate_collects_every_violation_without_mutating():
    m = np.array([[1.0, 2.0], [3.0, 0.0]])
    inst = TspInstance(m, symmetric=True)
    before = inst.costs.copy()
    rep = validate(inst)
    assert "nonzero diagonal at (1,1)" in rep.violations
    assert "asymmetric costs at (1,2)" in rep.violations
    np.testing.assert_array_equal(inst.costs, before)
    with pytest.raises(ValidationError):
        rep.raise_if_invalid()


def test_single_city_is_a_violation():
    assert any("fewer than 2" in v for v in validate(TspInstance(np.zeros((1, 1)))).violations)


def test_symmetric_flag_checks_missing_pairs():
    inst = TspInstance.from_rows([[0, None, 1], [1, 0, 1], [1, 1, 0]], symmetric=True)
    assert "asymmetric missing edge at (1,2)" in validate(inst).violations


def test_penalty_example_instance_missing_1_3():
    base = example_instance()
    inst = TspInstance(base.costs, {(0, 2), (2, 0)}, symmetric=True)
    assert inst.max_cost() == PI / 2
    out = apply_penalty(inst)
    assert out.costs[0, 2] == 2 * PI and out.costs[2, 0] == 2 * PI
    assert not out.missing and out.penalized == {(0, 2), (2, 0)}
    # no optimal tour uses the 1-3 edge, by exhaustive enumeration
    best = min(tour_cost(t, out) for t in enumerate_tours(4))
    for t in enumerate_tours(4):
        uses = any({a, b} == {0, 2} for a, b in t.legs())
        if uses:
            assert tour_cost(t, out) > best


def test_penalty_noop_without_missing(example4):
    assert apply_penalty(example4) is example4


def test_penalty_all_edges_missing():
    inst = TspInstance.from_rows([[0, None, None], [None, 0, None], [None, None, 0]])
    with pytest.raises(AllEdgesMissing):
        apply_penalty(inst)


def test_penalty_idempotent():
    inst = TspInstance.from_rows([[0, 2, None, 5], [2, 0, 3, 4], [None, 3, 0, 1], [5, 4, 1, 0]])
    once = apply_penalty(inst)
    twice = apply_penalty(once)
    np.testing.assert_array_equal(once.costs, twice.costs)
    assert once.penalized == twice.penalized


def test_penalized_optimum_avoids_penalty_edge():
    rng = np.random.default_rng(3)
    for _ in range(30):
        n = int(rng.integers(4, 7))
        m = rng.integers(1, 10, size=(n, n)).astype(float)
        np.fill_diagonal(m, 0)
        i, j = rng.choice(n, 2, replace=False)
        inst = apply_penalty(TspInstance(m, {(int(i), int(j))}))
        tour, cost = brute_force_solve(inst)
        avoiding = [t for t in enumerate_tours(n) if (i, j) not in t.legs()]
        if avoiding:
            assert (i, j) not in tour.legs()


def test_passthrough_keeps_example_phases(example4):
    pm = normalize(example4, 6)
    assert pm.scale == 1.0
    np.testing.assert_array_equal(pm.phi, example4.costs)
    assert pm.phi[0, 1] == PI / 2


def test_zero_matrix_warns():
    with pytest.warns(ZeroCostWarning):
        pm = normalize(TspInstance(np.zeros((3, 3))), 4)
    assert pm.scale == 1.0 and not pm.phi.any()


def test_scale_formula_c_max_10():
    rng = np.random.default_rng(0)
    m = rng.uniform(0, 10, size=(4, 4))
    m[1, 2] = 10.0
    np.fill_diagonal(m, 0)
    pm = normalize(TspInstance(m), 6)
    assert pm.scale == pytest.approx(0.154625, abs=1e-6)
    assert pm.scale == pytest.approx(2 * PI * (63 / 64) / 40, rel=1e-15)
    assert max(all_tour_phases(pm.phi)) < 2 * PI


def test_phases_mode_with_penalty_falls_back_to_costs():
    inst = TspInstance.from_rows([[0, 1, None], [1, 0, 1], [None, 1, 0]], mode="phases", symmetric=True)
    with pytest.warns(PhaseWrapWarning):
        pm = normalize(apply_penalty(inst), 5)
    assert pm.scale != 1.0 and pm.penalty_applied


def test_passthrough_wrap_warning():
    m = np.full((4, 4), 6.0)
    np.fill_diagonal(m, 0)
    with pytest.warns(PhaseWrapWarning):
        normalize(TspInstance(m, mode="phases"), 6)


def test_normalize_requires_penalty_first():
    inst = TspInstance.from_rows([[0, None], [1, 0]])
    with pytest.raises(ValidationError):
        normalize(inst, 3)


matrices = st.integers(2, 6).flatmap(
    lambda n: st.lists(
        st.lists(st.floats(0, 1e3, allow_nan=False, allow_subnormal=False), min_size=n, max_size=n), min_size=n, max_size=n
    )
)


@settings(max_examples=60, deadline=None)
@given(matrices, st.integers(1, 10), st.booleans())
def test_every_tour_phase_below_two_pi(rows, t, symmetric):
    m = np.array(rows)
    if symmetric:
        m = np.triu(m, 1) + np.triu(m, 1).T
    np.fill_diagonal(m, 0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ZeroCostWarning)
        pm = normalize(TspInstance(m, symmetric=symmetric), t)
    assert max(all_tour_phases(pm.phi)) < 2 * PI
    if symmetric:
        np.testing.assert_array_equal(pm.phi, pm.phi.T)
    if m.max() > 0:
        mask = m > 0
        rel = np.abs(pm.phi[mask] / pm.scale - m[mask]) / m[mask]
        assert rel.max() <= 1e-12


@settings(max_examples=40, deadline=None)
@given(matrices, st.integers(1, 10))
def test_normalize_is_linear(rows, t):
    m = np.array(rows)
    np.fill_diagonal(m, 0)
    if m.max() == 0:
        return
    a = normalize(TspInstance(m), t)
    b = normalize(TspInstance(2 * m), t)
    assert b.scale == pytest.approx(a.scale / 2, rel=1e-12)
    np.testing.assert_allclose(b.phi, a.phi, rtol=1e-12, atol=1e-12)
