"""Phase operators, their gate decompositions, and the tour <-> eigenstate bijection.

Register ``j`` (city ``j``) holds the index of the city visited just before
``j``. Factor ``U_j`` puts the phase of that incoming leg on the register, so
the product over all factors at a tour's basis state is the tour's total phase.
Register 1 occupies the most significant bits; inside a register qubit 0 is
the most significant bit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Iterator, Sequence

import numpy as np

from .errors import InvalidTour, NotACycle, RegisterOverflow
from .instance import PhaseMap

TWO_PI = 2.0 * math.pi
ANGLE_EPS = 1e-14

GATE_NAMES = ("x", "h", "p", "cp", "swap", "cx")


@dataclass(frozen=True)
class Gate:
    """One gate record. ``p``/``cp`` carry ``angle`` in radians."""

    name: str
    qubits: tuple[int, ...]
    angle: float = 0.0

    def __post_init__(self) -> None:
        arity = {"x": 1, "h": 1, "p": 1, "cp": 2, "swap": 2, "cx": 2}
        if self.name not in arity:
            raise ValueError(f"unknown gate {self.name!r}")
        if len(self.qubits) != arity[self.name]:
            raise ValueError(f"{self.name} takes {arity[self.name]} qubits, got {self.qubits}")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"{self.name} needs distinct qubits, got {self.qubits}")
        if not math.isfinite(self.angle):
            raise ValueError("gate angle must be finite")

    def shifted(self, mapping: Sequence[int]) -> "Gate":
        return Gate(self.name, tuple(mapping[q] for q in self.qubits), self.angle)


def x(q: int) -> Gate:
    return Gate("x", (q,))


def h(q: int) -> Gate:
    return Gate("h", (q,))


def phase(q: int, angle: float) -> Gate:
    return Gate("p", (q,), angle)


def cphase(control: int, target: int, angle: float) -> Gate:
    return Gate("cp", (control, target), angle)


def swap(a: int, b: int) -> Gate:
    return Gate("swap", (a, b))


def cx(control: int, target: int) -> Gate:
    return Gate("cx", (control, target))


@dataclass(frozen=True)
class GateSequence:
    """Ordered gates plus a global phase that is tracked but not emitted."""

    gates: tuple[Gate, ...] = ()
    global_phase: float = 0.0

    def __iter__(self) -> Iterator[Gate]:
        return iter(self.gates)

    def __len__(self) -> int:
        return len(self.gates)

    def __add__(self, other: "GateSequence") -> "GateSequence":
        return GateSequence(self.gates + other.gates, self.global_phase + other.global_phase)

    def width(self) -> int:
        return 1 + max((q for g in self.gates for q in g.qubits), default=-1)


def wrap_angle(a: float) -> float:
    """Reduce to [-pi, pi]."""
    return math.remainder(a, TWO_PI)


def _nonzero(a: float) -> bool:
    return abs(a) > ANGLE_EPS


def register_width(n: int) -> int:
    return max(1, math.ceil(math.log2(n)))


@dataclass(frozen=True)
class DiagonalUnitary:
    """Diagonal operator on ``qubits`` qubits stored as real phase angles."""

    angles: np.ndarray
    qubits: int

    def __post_init__(self) -> None:
        a = np.array(self.angles, dtype=float, copy=True)
        if a.shape != (2**self.qubits,):
            raise ValueError(f"expected {2**self.qubits} angles, got shape {a.shape}")
        a.setflags(write=False)
        object.__setattr__(self, "angles", a)

    @property
    def entries(self) -> np.ndarray:
        return np.exp(1j * self.angles)

    def matrix(self) -> np.ndarray:
        return np.diag(self.entries)

    @cached_property
    def decomposition(self) -> GateSequence:
        return decompose_diagonal(self)


@dataclass(frozen=True)
class TourPhaseOperator:
    """Tensor product ``U_1 x ... x U_n`` of per-city diagonal factors."""

    factors: tuple[DiagonalUnitary, ...]

    @property
    def n(self) -> int:
        return len(self.factors)

    @property
    def register_qubits(self) -> int:
        return self.factors[0].qubits

    @property
    def total_qubits(self) -> int:
        return self.n * self.register_qubits

    @cached_property
    def phases(self) -> np.ndarray:
        """Total phase at every basis index of the eigenstate registers."""
        r = self.register_qubits
        total = np.zeros((2**r,) * self.n)
        for j, f in enumerate(self.factors):
            shape = [1] * self.n
            shape[j] = 2**r
            total = total + f.angles.reshape(shape)
        flat = total.reshape(-1)
        flat.setflags(write=False)
        return flat

    def diagonal(self) -> np.ndarray:
        return np.exp(1j * self.phases)

    def phase_of(self, state: "Eigenstate") -> float:
        return float(self.phases[state.index])


def build_phase_operator(phases: PhaseMap) -> TourPhaseOperator:
    """Factor ``U_j`` has entry ``exp(i*phi[k, j])`` at basis ``k``; padding entries are 1.

    The ``1/sqrt(N)`` prefactor sometimes written on these factors is left
    out: with it the factors are not unitary.
    """
    n = phases.n
    r = register_width(n)
    factors = []
    for j in range(n):
        angles = np.zeros(2**r)
        angles[:n] = phases.phi[:, j]
        factors.append(DiagonalUnitary(angles, r))
    return TourPhaseOperator(tuple(factors))


def monomial_coefficients(angles: np.ndarray, r: int) -> np.ndarray:
    """Coefficients ``c[S]`` with ``angles[x] = sum over S subset of bits(x) of c[S]``.

    Index ``S`` is a bitmask laid out like basis indices (qubit 0 = MSB).
    Computed by the Moebius transform over the subset lattice, which is the
    recursive top-qubit split applied to every qubit in turn.
    """
    c = np.array(angles, dtype=float, copy=True)
    for b in range(r):
        bit = 1 << b
        for s in range(2**r):
            if s & bit:
                c[s] -= c[s ^ bit]
    return c


def _mask_qubits(mask: int, r: int) -> list[int]:
    return [q for q in range(r) if mask >> (r - 1 - q) & 1]


def _parity_terms(qubits: list[int], coeff: float) -> list[Gate]:
    """Phase ``coeff * prod(x_q)`` for three or more qubits via parity phases.

    Uses ``prod x = 2**(1-k) * sum_{T nonempty} (-1)**(|T|-1) * parity(T)``;
    each parity phase is a CNOT ladder onto the last qubit of ``T``.
    """
    k = len(qubits)
    out: list[Gate] = []
    for size in range(1, k + 1):
        for T in combinations(qubits, size):
            mu = wrap_angle(coeff * (-1) ** (size - 1) / 2 ** (k - 1))
            if not _nonzero(mu):
                continue
            target = T[-1]
            ladder = [cx(q, target) for q in T[:-1]]
            out.extend(ladder)
            out.append(phase(target, mu))
            out.extend(reversed(ladder))
    return out


def decompose_diagonal(u: DiagonalUnitary) -> GateSequence:
    """Phase and controlled-phase gates reproducing ``u`` up to a recorded global phase.

    For two qubits with ``u = diag(e^ia, e^ib, e^ic, e^id)`` this is
    ``Phase(MSB, c-a)``, ``Phase(LSB, b-a)``, ``CPhase(MSB, LSB, d+a-b-c)`` and
    global phase ``a``. Wider registers add parity networks for the
    three-qubit and higher terms. Zero angles are elided.
    """
    r = u.qubits
    coeffs = monomial_coefficients(u.angles, r)
    gates: list[Gate] = []
    masks = sorted(range(1, 2**r), key=lambda m: (bin(m).count("1"), _mask_qubits(m, r)))
    for m in masks:
        lam = wrap_angle(coeffs[m])
        if not _nonzero(lam):
            continue
        qs = _mask_qubits(m, r)
        if len(qs) == 1:
            gates.append(phase(qs[0], lam))
        elif len(qs) == 2:
            gates.append(cphase(qs[0], qs[1], lam))
        else:
            gates.extend(_parity_terms(qs, lam))
    return GateSequence(tuple(gates), float(coeffs[0]))


def _doubly_controlled_phase(c: int, a: int, b: int, lam: float) -> list[Gate]:
    """Five-gate ladder for a phase ``lam`` on ``|111>`` of qubits ``(c, a, b)``."""
    return [
        cphase(a, b, lam / 2),
        cx(c, a),
        cphase(a, b, -lam / 2),
        cx(c, a),
        cphase(c, b, lam / 2),
    ]


def controlled_factor(
    factor: DiagonalUnitary, power: int, control: int, qubits: Sequence[int]
) -> list[Gate]:
    """Gates applying ``factor**power`` on ``qubits`` when ``control`` is 1."""
    if control in qubits:
        raise ValueError("control qubit overlaps the register")
    dec = factor.decomposition
    out: list[Gate] = []
    for g in dec.gates:
        g = g.shifted(qubits)
        if g.name == "p":
            lam = wrap_angle(power * g.angle)
            if _nonzero(lam):
                out.append(cphase(control, g.qubits[0], lam))
        elif g.name == "cp":
            lam = wrap_angle(power * g.angle)
            if _nonzero(lam):
                out.extend(_doubly_controlled_phase(control, *g.qubits, lam))
        else:
            out.append(g)
    # under control the factor's global phase becomes a relative phase
    lam = wrap_angle(power * dec.global_phase)
    if _nonzero(lam):
        out.append(phase(control, lam))
    return out


def register_qubits(op: "TourPhaseOperator", j: int, offset: int = 0) -> list[int]:
    r = op.register_qubits
    return [offset + j * r + q for q in range(r)]


def controlled_power(
    op: TourPhaseOperator, power: int, control: int, offset: int = 0
) -> GateSequence:
    """Gates applying ``U**power`` to the registers when ``control`` is 1.

    Register ``j`` lives on qubits ``offset + j*r .. offset + (j+1)*r - 1``.
    Angles are scaled by ``power`` instead of repeating the sequence.
    """
    if power < 1 or power & (power - 1):
        raise ValueError(f"power must be a positive power of two, got {power}")
    out: list[Gate] = []
    for j, factor in enumerate(op.factors):
        out.extend(controlled_factor(factor, power, control, register_qubits(op, j, offset)))
    return GateSequence(tuple(out))


@dataclass(frozen=True, order=True)
class Tour:
    """Hamiltonian cycle as a 1-indexed visiting order starting at city 1."""

    order: tuple[int, ...]

    def __post_init__(self) -> None:
        order = tuple(int(c) for c in self.order)
        object.__setattr__(self, "order", order)
        if sorted(order) != list(range(1, len(order) + 1)):
            raise InvalidTour(f"{order} is not a permutation of 1..{len(order)}")
        if order[0] != 1:
            raise InvalidTour(f"canonical tours start at city 1, got {order}")

    @classmethod
    def from_cycle(cls, cities: Sequence[int]) -> "Tour":
        """Rotate any listing of the cycle so that it starts at city 1."""
        cities = [int(c) for c in cities]
        if 1 not in cities:
            raise InvalidTour(f"{cities} does not visit city 1")
        k = cities.index(1)
        return cls(tuple(cities[k:] + cities[:k]))

    @property
    def n(self) -> int:
        return len(self.order)

    def legs(self) -> list[tuple[int, int]]:
        """0-indexed (from, to) pairs including the closing leg."""
        o = [c - 1 for c in self.order]
        return [(o[i], o[(i + 1) % len(o)]) for i in range(len(o))]

    def reversed(self) -> "Tour":
        return Tour((1,) + tuple(reversed(self.order[1:])))

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.order)) + ")"


@dataclass(frozen=True)
class Eigenstate:
    bits: str
    n: int

    def __post_init__(self) -> None:
        r = register_width(self.n)
        if len(self.bits) != self.n * r or set(self.bits) - {"0", "1"}:
            raise ValueError(f"expected {self.n * r} bits for n={self.n}, got {self.bits!r}")

    @property
    def registers(self) -> list[int]:
        r = register_width(self.n)
        return [int(self.bits[k * r : (k + 1) * r], 2) for k in range(self.n)]

    @property
    def index(self) -> int:
        return int(self.bits, 2)

    @property
    def width(self) -> int:
        return len(self.bits)


def tour_to_eigenstate(tour: Tour, n: int | None = None) -> Eigenstate:
    n = tour.n if n is None else n
    if tour.n != n:
        raise InvalidTour(f"tour has {tour.n} cities, expected {n}")
    r = register_width(n)
    pred = [0] * n
    for a, b in tour.legs():
        pred[b] = a
    return Eigenstate("".join(format(p, f"0{r}b") for p in pred), n)


def eigenstate_to_tour(state: Eigenstate, n: int | None = None) -> Tour:
    n = state.n if n is None else n
    pred = state.registers
    if any(p >= n for p in pred):
        raise RegisterOverflow(f"register value >= {n} in {state.bits}")
    succ: dict[int, int] = {}
    for city, p in enumerate(pred):
        if p in succ:
            raise NotACycle(f"{state.bits}: city {p + 1} precedes more than one city")
        succ[p] = city
    order = [0]
    while len(order) < n:
        nxt = succ[order[-1]]
        if nxt == 0:
            raise NotACycle(f"{state.bits}: closes a subcycle of length {len(order)}")
        order.append(nxt)
    if succ[order[-1]] != 0:
        raise NotACycle(f"{state.bits}: does not return to city 1")
    return Tour(tuple(c + 1 for c in order))
