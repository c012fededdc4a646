import math

import numpy as np
import pytest

from tspqpe.encoding import build_phase_operator
from tspqpe.instance import TspInstance, normalize, example_instance

PI = math.pi

# eigenstate bits -> readout at t=6, in the reference order
REFERENCE_ROWS = [
    ("11000110", "100100"),
    ("01101100", "100100"),
    ("10001101", "100000"),
    ("01110010", "100000"),
    ("11100001", "011100"),
    ("10110100", "011100"),
]
REFERENCE_READOUT_5_6 = "011000"


@pytest.fixture
def example4():
    return example_instance()


@pytest.fixture
def example_phases(example4):
    return normalize(example4, 6)


@pytest.fixture
def example_op(example_phases):
    return build_phase_operator(example_phases)


def random_instance(rng, n, symmetric=False, low=1, high=10, integer=True):
    if integer:
        m = rng.integers(low, high + 1, size=(n, n)).astype(float)
    else:
        m = rng.uniform(low, high, size=(n, n))
    if symmetric:
        m = np.triu(m, 1) + np.triu(m, 1).T
    np.fill_diagonal(m, 0.0)
    return TspInstance(m, symmetric=symmetric, name=f"random{n}")


_I2 = np.eye(2)
_H = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
_X = np.array([[0, 1], [1, 0]])
_P0 = np.diag([1.0, 0.0])
_P1 = np.diag([0.0, 1.0])


def _embed(ops, width):
    """Kronecker product with qubit 0 as the most significant factor."""
    out = np.array([[1.0 + 0j]])
    for q in range(width):
        out = np.kron(out, ops.get(q, _I2))
    return out


def dense_gate(gate, width):
    """Full matrix of one gate, built from textbook definitions."""
    name, qs, lam = gate.name, gate.qubits, gate.angle
    if name == "x":
        return _embed({qs[0]: _X}, width)
    if name == "h":
        return _embed({qs[0]: _H}, width)
    if name == "p":
        return _embed({qs[0]: np.diag([1, np.exp(1j * lam)])}, width)
    if name == "cp":
        return _embed({qs[0]: _P0}, width) + _embed(
            {qs[0]: _P1, qs[1]: np.diag([1, np.exp(1j * lam)])}, width
        )
    if name == "cx":
        return _embed({qs[0]: _P0}, width) + _embed({qs[0]: _P1, qs[1]: _X}, width)
    if name == "swap":
        a, b = qs
        out = np.zeros((2**width, 2**width), dtype=complex)
        for i in range(2**width):
            bits = list(format(i, f"0{width}b"))
            bits[a], bits[b] = bits[b], bits[a]
            out[int("".join(bits), 2), i] = 1
        return out
    raise ValueError(name)


def dense_unitary(gates, width, global_phase=0.0):
    u = np.eye(2**width, dtype=complex) * np.exp(1j * global_phase)
    for g in gates:
        u = dense_gate(g, width) @ u
    return u
