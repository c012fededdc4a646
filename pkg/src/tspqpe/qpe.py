"""Phase estimation of route eigenstates and decoding of the readout into costs.

Circuit layout: phase register on qubits ``0 .. t-1`` (qubit 0 is the most
significant bit of the readout), eigenstate registers on ``t .. t + n*r - 1``.
The phase qubit whose readout weight is ``2**k`` controls ``U**(2**k)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .encoding import (
    Eigenstate,
    Gate,
    GateSequence,
    Tour,
    TourPhaseOperator,
    controlled_factor,
    h,
    register_qubits,
    tour_to_eigenstate,
    x,
)
from .errors import DomainError, WidthMismatch
from .instance import PhaseMap
from .oracle import enumerate_tours
from .simulator import (
    OutcomeDistribution,
    StateVector,
    apply_diagonal_fast,
    inverse_qft_gates,
    measure,
)

BACKENDS = ("gate", "diagonal")


def phase_qubits(n_bits: int, epsilon: float) -> int:
    """Register width for ``n_bits`` accurate bits with failure probability ``epsilon``.

    ``t = n + ceil(log2(2 + 1/(2*epsilon)))``.
    """
    if n_bits < 1:
        raise DomainError(f"n_bits must be >= 1, got {n_bits}")
    if not 0.0 < epsilon < 1.0:
        raise DomainError(f"epsilon must lie in (0, 1), got {epsilon}")
    bound = 2.0 + 1.0 / (2.0 * epsilon)
    # smallest k with 2**k >= bound, free of log rounding at exact powers
    k = 0
    while 2**k < bound:
        k += 1
    return n_bits + k


@dataclass(frozen=True)
class QpeConfig:
    n_bits: int = 4
    epsilon: float = 0.25
    t: int | None = None
    backend: str = "gate"
    shots: int | None = None
    seed: int | None = None

    def __post_init__(self) -> None:
        if not 0.0 < self.epsilon < 1.0:
            raise DomainError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if self.backend not in BACKENDS:
            raise ValueError(f"backend must be one of {BACKENDS}, got {self.backend!r}")
        if self.t is not None and self.t < 1:
            raise DomainError(f"phase register needs at least one qubit, got t={self.t}")

    @property
    def phase_qubits(self) -> int:
        return self.t if self.t is not None else phase_qubits(self.n_bits, self.epsilon)


@dataclass(frozen=True)
class QpeOutcome:
    bitstring: str
    probability: float
    theta: float
    phase: float
    cost: float
    tour: Tour | None = None
    eigenstate: str = ""

    @property
    def t(self) -> int:
        return len(self.bitstring)


def _prep_and_hadamards(eigenstate: Eigenstate, t: int) -> list:
    prep = [x(t + i) for i, b in enumerate(eigenstate.bits) if b == "1"]
    return prep + [h(q) for q in range(t)]


def qpe_sections(
    op: TourPhaseOperator, eigenstate: Eigenstate, t: int
) -> list[tuple[str, list[Gate]]]:
    """The gate-backend circuit split into labelled blocks, in execution order."""
    if eigenstate.width != op.total_qubits:
        raise WidthMismatch(f"eigenstate has {eigenstate.width} bits, operator {op.total_qubits}")
    sections = [
        ("eigenstate preparation", [x(t + i) for i, b in enumerate(eigenstate.bits) if b == "1"]),
        ("hadamard layer", [h(q) for q in range(t)]),
    ]
    for k in range(t):
        control = t - 1 - k
        for j, factor in enumerate(op.factors):
            gates = controlled_factor(factor, 2**k, control, register_qubits(op, j, t))
            sections.append((f"controlled U_{j + 1}^{2**k} on q[{control}]", gates))
    sections.append(("inverse QFT", inverse_qft_gates(range(t))))
    return sections


def qpe_circuit(op: TourPhaseOperator, eigenstate: Eigenstate, t: int) -> GateSequence:
    """Full gate list: eigenstate preparation, Hadamards, controlled powers, inverse QFT."""
    return GateSequence(tuple(g for _, gates in qpe_sections(op, eigenstate, t) for g in gates))


def qpe_state(
    op: TourPhaseOperator, eigenstate: Eigenstate, t: int, backend: str = "gate"
) -> StateVector:
    """Final statevector of the phase-estimation circuit before readout."""
    if eigenstate.width != op.total_qubits:
        raise WidthMismatch(f"eigenstate has {eigenstate.width} bits, operator {op.total_qubits}")
    state = StateVector(t + op.total_qubits)
    if backend == "gate":
        return state.run(qpe_circuit(op, eigenstate, t).gates)
    if backend != "diagonal":
        raise ValueError(f"backend must be one of {BACKENDS}, got {backend!r}")
    state.run(_prep_and_hadamards(eigenstate, t))
    for k in range(t):
        apply_diagonal_fast(state, op, 2**k, control=t - 1 - k, offset=t)
    return state.run(inverse_qft_gates(range(t)))


def run_qpe(
    op: TourPhaseOperator, eigenstate: Eigenstate, config: QpeConfig = QpeConfig()
) -> OutcomeDistribution:
    t = config.phase_qubits
    state = qpe_state(op, eigenstate, t, config.backend)
    return measure(state, range(t), shots=config.shots, seed=config.seed)


def decode_outcome(
    bitstring: str,
    scale: float,
    tour: Tour | None = None,
    probability: float = 1.0,
    eigenstate: str = "",
) -> QpeOutcome:
    if scale <= 0:
        raise DomainError(f"scale must be positive, got {scale}")
    theta = int(bitstring, 2) / 2 ** len(bitstring)
    ph = 2.0 * math.pi * theta
    return QpeOutcome(bitstring, probability, theta, ph, ph / scale, tour, eigenstate)


def quantization(t: int, scale: float) -> float:
    """Width of one phase bin in cost units."""
    return 2.0 * math.pi * 2.0**-t / scale


def run_all_routes(
    op: TourPhaseOperator,
    phases: PhaseMap,
    config: QpeConfig = QpeConfig(),
    dedup: bool | None = None,
) -> list[QpeOutcome]:
    """Most probable decoded outcome for every route, in canonical tour order.

    ``dedup`` defaults to the instance's symmetry flag; when set, one
    representative per reversal pair is run.
    """
    if dedup is None:
        dedup = phases.symmetric
    results = []
    for tour in enumerate_tours(phases.n, dedup_symmetric=dedup):
        es = tour_to_eigenstate(tour)
        dist = run_qpe(op, es, config)
        bits, p = dist.most_likely()
        results.append(decode_outcome(bits, phases.scale, tour, p, es.bits))
    return results


def accurate_probability(dist: OutcomeDistribution, theta: float, n_bits: int) -> float:
    """Probability of a readout within ``2**(t-n) - 1`` bins of ``floor(theta * 2**t)``.

    This is the event that the estimate is accurate to ``n_bits`` bits, the
    one bounded below by ``1 - epsilon`` when ``t = phase_qubits(n_bits, epsilon)``.
    """
    t = dist.width
    size = 2**t
    b = math.floor(theta * size) % size
    e = 2 ** (t - n_bits) - 1
    m = np.arange(size)
    d = np.abs(m - b)
    d = np.minimum(d, size - d)
    return float(dist.probs[d <= e].sum())
