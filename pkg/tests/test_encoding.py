import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import REFERENCE_ROWS, dense_unitary
from tspqpe.encoding import (
    DiagonalUnitary,
    Eigenstate,
    Tour,
    build_phase_operator,
    controlled_power,
    decompose_diagonal,
    eigenstate_to_tour,
    monomial_coefficients,
    tour_to_eigenstate,
)
from tspqpe.errors import InvalidTour, NotACycle, RegisterOverflow
from tspqpe.instance import PhaseMap, TspInstance, normalize
from tspqpe.oracle import enumerate_tours

PI = math.pi


def phase_map(phi, symmetric=False):
    phi = np.asarray(phi, dtype=float)
    return PhaseMap(phi, 1.0, False, symmetric)


def test_example_u1(example_op):
    expected = np.exp(1j * np.array([0, PI / 2, PI / 8, PI / 4]))
    np.testing.assert_allclose(example_op.factors[0].entries, expected, atol=1e-15)
    assert example_op.n == 4 and example_op.total_qubits == 8


def test_zero_phases_give_identity():
    op = build_phase_operator(phase_map(np.zeros((4, 4))))
    for f in op.factors:
        np.testing.assert_array_equal(f.entries, np.ones(4))
        assert len(f.decomposition) == 0


def test_three_city_padding():
    phi = np.array([[0, 0.3, 0.5], [0.7, 0, 1.1], [1.3, 1.7, 0]])
    op = build_phase_operator(phase_map(phi))
    u1 = op.factors[0]
    assert u1.qubits == 2
    np.testing.assert_allclose(u1.entries, np.exp(1j * np.array([0, 0.7, 1.3, 0])))
    assert u1.entries[3] == 1
    m = u1.matrix()
    np.testing.assert_allclose(m.conj().T @ m, np.eye(4), atol=1e-12)


def test_tensor_product_matches_kron(example_op):
    full = np.array([[1.0 + 0j]])
    for f in example_op.factors:
        full = np.kron(full, f.matrix())
    np.testing.assert_allclose(example_op.diagonal(), np.diag(full), atol=1e-12)


@pytest.mark.parametrize(
    "order,bits",
    [((1, 2, 3, 4), "11000110"), ((1, 2, 4, 3), "10001101"), ((1, 3, 2, 4), "11100001")],
)
def test_tour_to_eigenstate_examples(order, bits):
    assert tour_to_eigenstate(Tour(order)).bits == bits


def test_eigenstate_to_tour_examples():
    assert eigenstate_to_tour(Eigenstate("11000110", 4)) == Tour((1, 2, 3, 4))
    row2 = eigenstate_to_tour(Eigenstate("01101100", 4))
    assert row2 == Tour((1, 4, 3, 2)) == Tour((1, 2, 3, 4)).reversed()
    with pytest.raises(NotACycle):
        eigenstate_to_tour(Eigenstate("00000000", 4))


def test_subcycle_and_overflow_rejected():
    # 1->2->1 and 3->4->3
    with pytest.raises(NotACycle):
        eigenstate_to_tour(Eigenstate("01001110", 4))
    with pytest.raises(RegisterOverflow):
        eigenstate_to_tour(Eigenstate("111000", 3))


def test_reference_eigenstates_round_trip():
    for bits, _ in REFERENCE_ROWS:
        assert tour_to_eigenstate(eigenstate_to_tour(Eigenstate(bits, 4))).bits == bits


@pytest.mark.parametrize("n", [3, 4, 5])
def test_bijection(n):
    tours = enumerate_tours(n)
    states = {tour_to_eigenstate(t).bits for t in tours}
    assert len(states) == math.factorial(n - 1)
    for t in tours:
        assert eigenstate_to_tour(tour_to_eigenstate(t)) == t


def test_tour_validation():
    with pytest.raises(InvalidTour):
        Tour((2, 1, 3))
    with pytest.raises(InvalidTour):
        Tour((1, 1, 3))
    assert Tour.from_cycle([3, 1, 2]) == Tour((1, 2, 3))
    assert str(Tour((1, 3, 2))) == "(1,3,2)"


@pytest.mark.parametrize("n", [3, 4, 5])
def test_phase_additivity(n):
    rng = np.random.default_rng(n)
    phi = rng.uniform(0, 1, size=(n, n))
    np.fill_diagonal(phi, 0)
    op = build_phase_operator(phase_map(phi))
    diag = op.diagonal()
    for t in enumerate_tours(n):
        total = sum(phi[a, b] for a, b in t.legs())
        es = tour_to_eigenstate(t)
        assert abs(diag[es.index] - np.exp(1j * total)) < 1e-10


def test_reversal_shares_phase(example_op):
    diag = example_op.diagonal()
    for t in enumerate_tours(4, dedup_symmetric=True):
        a, b = tour_to_eigenstate(t), tour_to_eigenstate(t.reversed())
        assert a.bits != b.bits
        assert abs(diag[a.index] - diag[b.index]) < 1e-12


def test_unitarity_of_factors():
    rng = np.random.default_rng(11)
    for n in range(2, 7):
        phi = rng.uniform(0, 2 * PI, size=(n, n))
        np.fill_diagonal(phi, 0)
        op = build_phase_operator(phase_map(phi))
        for f in op.factors:
            assert np.max(np.abs(np.abs(f.entries) - 1)) <= 1e-12


def _reconstruct(u):
    seq = decompose_diagonal(u)
    return np.diag(dense_unitary(seq.gates, u.qubits, seq.global_phase))


def test_decomposition_of_example_u1(example_op):
    seq = example_op.factors[0].decomposition
    got = [(g.name, g.qubits, g.angle) for g in seq.gates]
    assert [g[:2] for g in got] == [("p", (0,)), ("p", (1,)), ("cp", (0, 1))]
    assert got[0][2] == pytest.approx(PI / 8, abs=1e-15)
    assert got[1][2] == pytest.approx(PI / 2, abs=1e-15)
    assert got[2][2] == pytest.approx(-3 * PI / 8, abs=1e-15)
    assert seq.global_phase == 0
    target = np.exp(1j * np.array([0, PI / 2, PI / 8, PI / 4]))
    np.testing.assert_allclose(_reconstruct(example_op.factors[0]), target, atol=1e-12)


def test_decomposition_trivial_cases():
    ident = decompose_diagonal(DiagonalUnitary(np.zeros(4), 2))
    assert len(ident) == 0 and ident.global_phase == 0
    only_d = decompose_diagonal(DiagonalUnitary([0, 0, 0, PI], 2))
    assert [(g.name, g.qubits) for g in only_d.gates] == [("cp", (0, 1))]
    assert abs(only_d.gates[0].angle) == pytest.approx(PI)


def test_correction_exponent():
    a, b, c, d = 0.1, 0.7, 1.9, 2.6
    u = DiagonalUnitary([a, b, c, d], 2)
    cp = [g for g in u.decomposition.gates if g.name == "cp"][0]
    assert cp.angle == pytest.approx(d + a - b - c)
    # swapping in the d+c-a-b ordering reconstructs a different matrix
    alt = [g if g.name != "cp" else type(g)("cp", g.qubits, d + c - a - b) for g in u.decomposition.gates]
    got = np.diag(dense_unitary(alt, 2, u.decomposition.global_phase))
    assert np.max(np.abs(got - u.entries)) > 0.1


@pytest.mark.parametrize("r", [1, 2, 3])
def test_random_reconstructions(r):
    rng = np.random.default_rng(100 + r)
    for _ in range(1000 if r == 2 else 200):
        angles = rng.uniform(-4 * PI, 4 * PI, size=2**r)
        u = DiagonalUnitary(angles, r)
        assert np.max(np.abs(_reconstruct(u) - u.entries)) <= 1e-12


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-10, 10), min_size=8, max_size=8))
def test_monomial_coefficients_invert(angles):
    coeffs = monomial_coefficients(np.array(angles), 3)
    # sum of coefficients over submasks reproduces every angle
    for x in range(8):
        total = sum(coeffs[m] for m in range(8) if m & x == m)
        assert total == pytest.approx(angles[x], abs=1e-9)


def _controlled_action(op, power, bits):
    seq = controlled_power(op, power, control=0, offset=1)
    width = 1 + op.total_qubits
    u = dense_unitary(seq.gates, width)
    on = int("1" + bits, 2)
    off = int("0" + bits, 2)
    return u, on, off


def test_controlled_power_example(example_op):
    u, on, off = _controlled_action(example_op, 1, "11000110")
    assert abs(u[on, on] - np.exp(1j * 9 * PI / 8)) < 1e-12
    assert abs(u[off, off] - 1) < 1e-12
    assert np.allclose(u, np.diag(np.diag(u)), atol=1e-12)
    u2, on, _ = _controlled_action(example_op, 2, "11000110")
    assert abs(u2[on, on] - np.exp(1j * 9 * PI / 4)) < 1e-12


def test_controlled_power_identity():
    op = build_phase_operator(phase_map(np.zeros((4, 4))))
    for power in (1, 2, 8):
        seq = controlled_power(op, power, control=0, offset=1)
        assert all(g.name not in ("p", "cp") for g in seq.gates)


def test_controlled_power_three_qubit_registers():
    rng = np.random.default_rng(5)
    phi = rng.uniform(0, 1, size=(5, 5))
    np.fill_diagonal(phi, 0)
    op = build_phase_operator(phase_map(phi))
    # single factor check keeps the dense oracle small
    from tspqpe.encoding import controlled_factor

    f = op.factors[2]
    for power in (1, 4):
        gates = controlled_factor(f, power, 0, [1, 2, 3])
        u = dense_unitary(gates, 4)
        np.testing.assert_allclose(np.diag(u)[:8], 1, atol=1e-12)
        np.testing.assert_allclose(np.diag(u)[8:], f.entries**power, atol=1e-11)


def test_controlled_power_rejects_non_powers(example_op):
    for bad in (0, 3, -2):
        with pytest.raises(ValueError):
            controlled_power(example_op, bad, 0, 1)


def test_normalized_operator_from_costs():
    inst = TspInstance(np.array([[0, 2.0, 3.0], [2.0, 0, 4.0], [3.0, 4.0, 0]]), symmetric=True)
    pm = normalize(inst, 5)
    op = build_phase_operator(pm)
    es = tour_to_eigenstate(Tour((1, 2, 3)))
    assert op.phase_of(es) == pytest.approx(9.0 * pm.scale)
