"""Dense statevector engine.

Qubit 0 is the most significant bit of a basis index, so ``format(i, "0qb")``
reads the qubits left to right. Gates mutate the state in place.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .encoding import Gate, GateSequence, TourPhaseOperator, cphase, h, swap
from .errors import DuplicateTarget, IndexOutOfRange, ZeroShots

_SQRT1_2 = 1.0 / math.sqrt(2.0)
NORM_TOL = 1e-12


class StateVector:
    """``2**qubits`` complex amplitudes with in-place gate kernels."""

    def __init__(self, qubits: int, amps: np.ndarray | None = None):
        self.qubits = int(qubits)
        if amps is None:
            amps = np.zeros(2**self.qubits, dtype=np.complex128)
            amps[0] = 1.0
        else:
            amps = np.array(amps, dtype=np.complex128).reshape(-1)
            if amps.size != 2**self.qubits:
                raise ValueError(f"need {2**self.qubits} amplitudes, got {amps.size}")
        self.amps = amps

    @classmethod
    def basis(cls, bits: str) -> "StateVector":
        sv = cls(len(bits))
        sv.amps[0] = 0.0
        sv.amps[int(bits, 2)] = 1.0
        return sv

    def copy(self) -> "StateVector":
        return StateVector(self.qubits, self.amps.copy())

    def norm_sq(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)

    def _check(self, *qs: int) -> None:
        for q in qs:
            if not 0 <= q < self.qubits:
                raise IndexOutOfRange(f"qubit {q} outside a {self.qubits}-qubit state")

    def _split(self, q: int) -> np.ndarray:
        # view with axis 1 = qubit q
        return self.amps.reshape(2**q, 2, -1)

    def _tensor(self) -> np.ndarray:
        return self.amps.reshape((2,) * self.qubits)

    def _select(self, fixed: dict[int, int]) -> tuple:
        idx: list = [slice(None)] * self.qubits
        for q, v in fixed.items():
            idx[q] = v
        return tuple(idx)

    def x(self, q: int) -> None:
        self._check(q)
        v = self._split(q)
        tmp = v[:, 0, :].copy()
        v[:, 0, :] = v[:, 1, :]
        v[:, 1, :] = tmp

    def x_layer(self, qs: Sequence[int]) -> None:
        """Several X gates in one pass (a single index permutation)."""
        if not qs:
            return
        self._check(*qs)
        t = self._tensor()
        flipped = np.flip(t, axis=tuple(sorted(set(qs))))
        self.amps = np.ascontiguousarray(flipped).reshape(-1)

    def h(self, q: int) -> None:
        self._check(q)
        v = self._split(q)
        s0, s1 = v[:, 0, :], v[:, 1, :]
        diff = s0 - s1
        s0 += s1
        s0 *= _SQRT1_2
        np.multiply(diff, _SQRT1_2, out=s1)

    def phase(self, q: int, angle: float) -> None:
        self._check(q)
        self._split(q)[:, 1, :] *= np.exp(1j * angle)

    def cphase(self, c: int, t: int, angle: float) -> None:
        self._check(c, t)
        if c == t:
            raise DuplicateTarget("controlled phase needs two distinct qubits")
        self._tensor()[self._select({c: 1, t: 1})] *= np.exp(1j * angle)

    def cx(self, c: int, t: int) -> None:
        self._check(c, t)
        if c == t:
            raise DuplicateTarget("cx needs two distinct qubits")
        T = self._tensor()
        a, b = self._select({c: 1, t: 0}), self._select({c: 1, t: 1})
        tmp = T[a].copy()
        T[a] = T[b]
        T[b] = tmp

    def swap(self, a: int, b: int) -> None:
        self._check(a, b)
        if a == b:
            return
        T = self._tensor()
        i, j = self._select({a: 0, b: 1}), self._select({a: 1, b: 0})
        tmp = T[i].copy()
        T[i] = T[j]
        T[j] = tmp

    def apply(self, gate: Gate) -> "StateVector":
        name = gate.name
        if name == "x":
            self.x(*gate.qubits)
        elif name == "h":
            self.h(*gate.qubits)
        elif name == "p":
            self.phase(gate.qubits[0], gate.angle)
        elif name == "cp":
            self.cphase(*gate.qubits, gate.angle)
        elif name == "cx":
            self.cx(*gate.qubits)
        elif name == "swap":
            self.swap(*gate.qubits)
        else:
            raise ValueError(f"unknown gate {name!r}")
        return self

    def run(self, gates: Iterable[Gate]) -> "StateVector":
        """Apply gates in order; runs of X gates are fused into one permutation."""
        pending: list[int] = []
        for g in gates:
            if g.name == "x":
                pending.append(g.qubits[0])
                continue
            if pending:
                self._flush_x(pending)
                pending = []
            self.apply(g)
        if pending:
            self._flush_x(pending)
        return self

    def _flush_x(self, qs: list[int]) -> None:
        # X twice on a qubit cancels
        odd = [q for q in set(qs) if qs.count(q) % 2]
        self.x_layer(odd)

    def apply_global_phase(self, angle: float) -> None:
        self.amps *= np.exp(1j * angle)

    def phase_flip(self, marked: np.ndarray) -> None:
        """Diagonal oracle: negate the amplitudes of the marked basis states."""
        if marked.shape != self.amps.shape:
            raise IndexOutOfRange("oracle mask does not match the state size")
        self.amps[marked] *= -1.0

    def reflect_zero(self) -> None:
        """``2|0><0| - I``."""
        self.amps[1:] *= -1.0


def apply_diagonal_fast(
    state: StateVector,
    op: TourPhaseOperator,
    power: int,
    control: int,
    offset: int,
) -> StateVector:
    """Multiply each control-1 amplitude by ``exp(i * power * phi(x))``.

    ``x`` is the value of the eigenstate registers, which occupy the
    contiguous qubits ``offset .. offset + op.total_qubits - 1``.
    """
    width = op.total_qubits
    state._check(control, offset, offset + width - 1)
    if offset <= control < offset + width:
        raise IndexOutOfRange("control qubit overlaps the eigenstate registers")
    if power == 0:
        return state
    factor = np.exp(1j * np.mod(power * op.phases, 2.0 * math.pi))
    sub = state._tensor()[state._select({control: 1})]
    before = offset - (1 if control < offset else 0)
    after = sub.ndim - before - width
    sub *= factor.reshape((1,) * before + (2,) * width + (1,) * after)
    return state


def _check_targets(targets: Sequence[int]) -> list[int]:
    targets = list(targets)
    if len(set(targets)) != len(targets):
        raise DuplicateTarget(f"repeated qubit in {targets}")
    return targets


def qft_gates(targets: Sequence[int]) -> list[Gate]:
    """Forward QFT with ``targets[0]`` as the most significant qubit."""
    targets = _check_targets(targets)
    t = len(targets)
    out: list[Gate] = []
    for j in range(t):
        out.append(h(targets[j]))
        for k in range(j + 1, t):
            out.append(cphase(targets[k], targets[j], math.pi / 2 ** (k - j)))
    for i in range(t // 2):
        out.append(swap(targets[i], targets[t - 1 - i]))
    return out


def inverse_qft_gates(targets: Sequence[int]) -> list[Gate]:
    """Inverse QFT: Hadamards and ``-pi/2**k`` controlled phases, then the order swaps.

    The rotations run over the reversed qubit order so the swaps can come last.
    """
    targets = _check_targets(targets)
    t = len(targets)
    rev = targets[::-1]
    out: list[Gate] = []
    for j in reversed(range(t)):
        for k in reversed(range(j + 1, t)):
            out.append(cphase(rev[k], rev[j], -math.pi / 2 ** (k - j)))
        out.append(h(rev[j]))
    for i in range(t // 2):
        out.append(swap(targets[i], targets[t - 1 - i]))
    return out


def inverse_qft(state: StateVector, targets: Sequence[int]) -> StateVector:
    return state.run(inverse_qft_gates(targets))


def qft(state: StateVector, targets: Sequence[int]) -> StateVector:
    return state.run(qft_gates(targets))


@dataclass(frozen=True)
class OutcomeDistribution:
    """Probabilities over the bitstrings of ``width`` measured qubits."""

    probs: np.ndarray
    width: int

    def __post_init__(self) -> None:
        p = np.array(self.probs, dtype=float, copy=True)
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    def __getitem__(self, bits: str) -> float:
        return float(self.probs[int(bits, 2)])

    def bitstring(self, index: int) -> str:
        return format(index, f"0{self.width}b")

    def most_likely(self) -> tuple[str, float]:
        i = int(np.argmax(self.probs))
        return self.bitstring(i), float(self.probs[i])

    def to_dict(self, cutoff: float = 1e-12) -> dict[str, float]:
        return {
            self.bitstring(i): float(p) for i, p in enumerate(self.probs) if p > cutoff
        }

    def total_variation(self, other: "OutcomeDistribution") -> float:
        return 0.5 * float(np.abs(self.probs - other.probs).sum())


def marginal_probabilities(state: StateVector, targets: Sequence[int]) -> np.ndarray:
    targets = _check_targets(targets)
    state._check(*targets)
    p = np.abs(state._tensor()) ** 2
    others = tuple(q for q in range(state.qubits) if q not in targets)
    p = p.sum(axis=others)
    # remaining axes are in ascending qubit order; reorder to targets order
    order = sorted(targets)
    p = np.transpose(p, [order.index(q) for q in targets])
    return p.reshape(-1)


def sample(
    state: StateVector, targets: Sequence[int], shots: int, seed: int | None
) -> np.ndarray:
    """Seeded sequence of measured outcomes (integers over ``targets``)."""
    if shots <= 0:
        raise ZeroShots("shot count must be positive")
    p = marginal_probabilities(state, targets)
    rng = np.random.default_rng(seed)
    return rng.choice(p.size, size=shots, p=p / p.sum())


def measure(
    state: StateVector,
    targets: Sequence[int],
    shots: int | None = None,
    seed: int | None = None,
) -> OutcomeDistribution:
    """Exact marginal distribution, or empirical frequencies when ``shots`` is given."""
    targets = list(targets)
    if shots is None:
        return OutcomeDistribution(marginal_probabilities(state, targets), len(targets))
    draws = sample(state, targets, shots, seed)
    counts = np.bincount(draws, minlength=2 ** len(targets))
    return OutcomeDistribution(counts / shots, len(targets))


def run_sequence(state: StateVector, seq: GateSequence) -> StateVector:
    state.run(seq.gates)
    if seq.global_phase:
        state.apply_global_phase(seq.global_phase)
    return state
