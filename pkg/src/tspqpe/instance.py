"""TSP problem input: validation, missing-edge penalties and cost-to-phase normalization.

Cities are 0-indexed internally. Every message and file format that a user
sees is 1-indexed.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import AllEdgesMissing, SchemaError, ValidationError

TWO_PI = 2.0 * math.pi

MODES = ("costs", "phases")


class ZeroCostWarning(UserWarning):
    """All costs are zero, so every tour ties at phase 0."""


class PhaseWrapWarning(UserWarning):
    """Passthrough phases may sum past 2*pi on some tour."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class TspInstance:
    """Cost matrix plus metadata.

    ``costs[i, j]`` is the cost of travelling from city ``i`` to city ``j``.
    Entries listed in ``missing`` hold ``inf``; ``penalized`` records the
    pairs that :func:`apply_penalty` filled in.
    """

    costs: np.ndarray
    missing: frozenset = frozenset()
    symmetric: bool = False
    name: str = "unnamed"
    mode: str = "costs"
    penalized: frozenset = frozenset()

    def __post_init__(self) -> None:
        costs = np.array(self.costs, dtype=float, copy=True)
        if costs.ndim != 2 or costs.shape[0] != costs.shape[1]:
            raise SchemaError(f"cost matrix must be square, got shape {costs.shape}")
        if self.mode not in MODES:
            raise SchemaError(f"mode must be one of {MODES}, got {self.mode!r}")
        missing = frozenset((int(i), int(j)) for i, j in self.missing)
        n = costs.shape[0]
        for i, j in missing:
            if not (0 <= i < n and 0 <= j < n):
                raise SchemaError(f"missing edge ({i + 1},{j + 1}) outside a {n}-city matrix")
            costs[i, j] = math.inf
        object.__setattr__(self, "costs", _frozen(costs))
        object.__setattr__(self, "missing", missing)
        object.__setattr__(self, "penalized", frozenset(self.penalized))

    @property
    def n(self) -> int:
        return self.costs.shape[0]

    @classmethod
    def from_rows(
        cls,
        rows: Sequence[Sequence[float | None]],
        *,
        symmetric: bool = False,
        name: str = "unnamed",
        mode: str = "costs",
    ) -> "TspInstance":
        """Build from nested lists where ``None`` marks a missing edge."""
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise SchemaError("ragged matrix: every row needs exactly n entries")
        costs = np.zeros((n, n))
        missing = set()
        for i, row in enumerate(rows):
            for j, v in enumerate(row):
                if v is None:
                    missing.add((i, j))
                else:
                    costs[i, j] = float(v)
        return cls(costs, frozenset(missing), symmetric, name, mode)

    def present_costs(self) -> np.ndarray:
        """Off-diagonal costs of the edges that exist."""
        mask = ~np.eye(self.n, dtype=bool)
        for i, j in self.missing:
            mask[i, j] = False
        return self.costs[mask]

    def max_cost(self) -> float:
        present = self.present_costs()
        return float(present.max()) if present.size else 0.0


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def raise_if_invalid(self) -> None:
        if self.violations:
            raise ValidationError("; ".join(self.violations))


def validate(instance: TspInstance) -> ValidationReport:
    """Collect every invariant violation; never raises."""
    out: list[str] = []
    n = instance.n
    c = instance.costs
    if n < 2:
        out.append(f"fewer than 2 cities (n={n})")
    for i in range(n):
        if (i, i) in instance.missing:
            out.append(f"missing edge on diagonal at ({i + 1},{i + 1})")
        elif c[i, i] != 0.0:
            out.append(f"nonzero diagonal at ({i + 1},{i + 1})")
    for i in range(n):
        for j in range(n):
            if i == j or (i, j) in instance.missing:
                continue
            v = c[i, j]
            if not math.isfinite(v):
                out.append(f"non-finite cost at ({i + 1},{j + 1})")
            elif v < 0:
                out.append(f"negative cost at ({i + 1},{j + 1})")
            elif instance.mode == "phases" and v >= TWO_PI:
                out.append(f"phase not below 2*pi at ({i + 1},{j + 1})")
    if instance.symmetric:
        for i in range(n):
            for j in range(i + 1, n):
                mi, mj = (i, j) in instance.missing, (j, i) in instance.missing
                if mi != mj:
                    out.append(f"asymmetric missing edge at ({i + 1},{j + 1})")
                elif not mi and c[i, j] != c[j, i]:
                    out.append(f"asymmetric costs at ({i + 1},{j + 1})")
    return ValidationReport(tuple(out))


def apply_penalty(instance: TspInstance) -> TspInstance:
    """Replace each missing edge by the penalty ``n * c_max``.

    A tour built only from real edges costs at most ``n * c_max``, so any
    tour that needs a penalized edge can never beat one that avoids them.
    The penalty is kept this small because every extra unit of cost range
    shrinks the phase resolution left for the real edges.
    """
    if not instance.missing:
        return instance
    n = instance.n
    for i in range(n):
        out_ok = any(j != i and (i, j) not in instance.missing for j in range(n))
        in_ok = any(j != i and (j, i) not in instance.missing for j in range(n))
        if not (out_ok and in_ok):
            raise AllEdgesMissing(f"city {i + 1} has no finite outgoing or incoming edge")
    c_max = instance.max_cost()
    # all-zero real edges: a unit penalty still strictly dominates
    penalty = n * c_max if c_max > 0 else 1.0
    costs = np.array(instance.costs)
    for i, j in instance.missing:
        costs[i, j] = penalty
    return TspInstance(
        costs,
        frozenset(),
        instance.symmetric,
        instance.name,
        instance.mode,
        instance.penalized | instance.missing,
    )


@dataclass(frozen=True)
class PhaseMap:
    """Phases ``phi[i, j]`` in radians and the radians-per-cost-unit ``scale``."""

    phi: np.ndarray
    scale: float
    penalty_applied: bool = False
    symmetric: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "phi", _frozen(self.phi))

    @property
    def n(self) -> int:
        return self.phi.shape[0]

    def to_cost(self, phase: float) -> float:
        return phase / self.scale


def incoming_bound(matrix: np.ndarray) -> float:
    """Upper bound on any tour total: each city is entered exactly once."""
    m = np.array(matrix, dtype=float)
    np.fill_diagonal(m, -math.inf)
    return float(m.max(axis=0).sum())


def normalize(instance: TspInstance, t: int, passthrough: bool | None = None) -> PhaseMap:
    """Scale costs into phases so that no tour reaches ``2*pi``.

    The scale leaves one ``t``-bit phase bin of headroom below ``2*pi``:
    ``s = 2*pi*(1 - 2**-t) / (n * c_max)``. In passthrough mode the entries
    are already phases and ``s = 1``. Passthrough defaults to on for
    ``mode == "phases"`` instances unless penalties were substituted.
    """
    if instance.missing:
        raise ValidationError("instance has missing edges; run apply_penalty first")
    if t < 1:
        raise ValueError(f"phase-qubit count must be >= 1, got {t}")
    n = instance.n
    costs = np.array(instance.costs)
    if passthrough is None:
        passthrough = instance.mode == "phases"
        if passthrough and instance.penalized:
            warnings.warn(
                "penalty edges exceed the phase range; normalizing as costs instead",
                PhaseWrapWarning,
                stacklevel=2,
            )
            passthrough = False
    if passthrough:
        if np.any(costs < 0) or np.any(costs >= TWO_PI):
            raise ValidationError("passthrough phases must lie in [0, 2*pi)")
        if incoming_bound(costs) >= TWO_PI:
            warnings.warn(
                "some tour may sum to 2*pi or more and alias in phase estimation",
                PhaseWrapWarning,
                stacklevel=2,
            )
        return PhaseMap(costs, 1.0, bool(instance.penalized), instance.symmetric)
    c_max = instance.max_cost()
    if c_max == 0.0:
        warnings.warn("all costs are zero; every tour ties", ZeroCostWarning, stacklevel=2)
        return PhaseMap(np.zeros_like(costs), 1.0, bool(instance.penalized), instance.symmetric)
    span = TWO_PI * (1.0 - 2.0**-t) / n
    # divide first so a tiny c_max cannot overflow the product
    phi = (costs / c_max) * span
    return PhaseMap(phi, span / c_max, bool(instance.penalized), instance.symmetric)


def example_instance() -> TspInstance:
    """The symmetric four-city phase matrix used as the worked example."""
    p = math.pi
    phases = {
        (0, 1): p / 2,
        (0, 2): p / 8,
        (0, 3): p / 4,
        (1, 2): p / 4,
        (1, 3): p / 4,
        (2, 3): p / 8,
    }
    m = np.zeros((4, 4))
    for (i, j), v in phases.items():
        m[i, j] = m[j, i] = v
    return TspInstance(m, symmetric=True, name="paper4", mode="phases")


def missing_pairs_1based(pairs: Iterable[tuple[int, int]]) -> list[list[int]]:
    return sorted([i + 1, j + 1] for i, j in pairs)
