"""Minimum finding over the decoded route database.

The quantum path is the Durr-Hoyer threshold loop driven by the exponential
Grover search of Boyer, Brassard, Hoyer and Tapp (BBHT). Grover runs on the
statevector simulator for databases up to ``2**12`` entries and on the closed
form ``sin^2((2j+1) * asin(sqrt(k/N)))`` above that.

Query accounting: every Grover iteration applies the comparison oracle once,
and every measured candidate is checked against the threshold with one more
oracle call. Budgets are expressed in these queries.

Schedule constants: cutoff growth ``8/7`` per failed round, cutoff capped at
``sqrt(N)`` for an ``N``-index register, and a per-run budget of
``ceil(22.5*sqrt(M) + 1.4*log2(M)**2)`` queries for ``M`` entries.
"""
from __future__ import annotations

import bisect
import math
import random
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .encoding import Tour
from .errors import EmptyDatabase
from .simulator import StateVector

SIMULATOR_LIMIT = 2**12
GROWTH = 8.0 / 7.0


def query_budget(m: int) -> int:
    return math.ceil(22.5 * math.sqrt(m) + 1.4 * math.log2(m) ** 2) if m > 1 else 1


def repetitions(confidence: float) -> int:
    """Independent runs needed when each succeeds with probability at least 1/2."""
    if not 0.0 < confidence < 1.0:
        raise ValueError(f"confidence must lie in (0, 1), got {confidence}")
    return max(1, math.ceil(math.log(1.0 - confidence) / math.log(0.5)))


class GroverEngine:
    """Measurement distributions after ``j`` Grover iterations, per marked set.

    Index register of ``ceil(log2 M)`` qubits; padding indices are never marked.
    """

    def __init__(self, m: int, mode: str = "auto"):
        if mode == "auto":
            mode = "simulator" if m <= SIMULATOR_LIMIT else "analytic"
        if mode not in ("simulator", "analytic"):
            raise ValueError(f"unknown Grover mode {mode!r}")
        self.mode = mode
        self.m = m
        self.qubits = max(1, math.ceil(math.log2(m))) if m > 1 else 1
        self.size = 2**self.qubits
        self._cache: dict[bytes, list[list[float]]] = {}
        self._states: dict[bytes, StateVector] = {}

    def _iterate(self, sv: StateVector, marked: np.ndarray) -> None:
        sv.phase_flip(marked)
        for q in range(self.qubits):
            sv.h(q)
        sv.reflect_zero()
        for q in range(self.qubits):
            sv.h(q)

    def probabilities(self, marked: np.ndarray, j: int) -> np.ndarray:
        """Exact outcome distribution over the ``2**qubits`` indices."""
        full = np.zeros(self.size, dtype=bool)
        full[: self.m] = marked
        if self.mode == "analytic":
            return self._analytic(full, j)
        sv = StateVector(self.qubits)
        for q in range(self.qubits):
            sv.h(q)
        for _ in range(j):
            self._iterate(sv, full)
        return np.abs(sv.amps) ** 2

    def _analytic(self, full: np.ndarray, j: int) -> np.ndarray:
        k = int(full.sum())
        n = self.size
        if k == 0:
            return np.full(n, 1.0 / n)
        if k == n:
            return np.full(n, 1.0 / n)
        theta = math.asin(math.sqrt(k / n))
        p_good = math.sin((2 * j + 1) * theta) ** 2
        out = np.where(full, p_good / k, (1.0 - p_good) / (n - k))
        return out

    def cumulative(self, marked: np.ndarray, j: int) -> list[float]:
        """Cached cumulative distribution, built one iteration at a time."""
        key = np.packbits(marked).tobytes() + self.m.to_bytes(4, "little")
        table = self._cache.setdefault(key, [])
        if self.mode == "analytic":
            while len(table) <= j:
                full = np.zeros(self.size, dtype=bool)
                full[: self.m] = marked
                table.append(np.cumsum(self._analytic(full, len(table))).tolist())
            return table[j]
        if len(table) <= j:
            full = np.zeros(self.size, dtype=bool)
            full[: self.m] = marked
            sv = self._states.get(key)
            if sv is None:
                sv = StateVector(self.qubits)
                for q in range(self.qubits):
                    sv.h(q)
                table.append(np.cumsum(np.abs(sv.amps) ** 2).tolist())
            while len(table) <= j:
                self._iterate(sv, full)
                table.append(np.cumsum(np.abs(sv.amps) ** 2).tolist())
            self._states[key] = sv
        return table[j]

    def measure(self, marked: np.ndarray, j: int, rng: random.Random) -> int:
        cum = self.cumulative(marked, j)
        i = bisect.bisect_right(cum, rng.random() * cum[-1])
        return min(i, self.size - 1)


@dataclass(frozen=True)
class CostDatabase:
    """Route costs in canonical tour order."""

    costs: np.ndarray
    tours: tuple[Tour, ...] | None = None

    def __post_init__(self) -> None:
        c = np.array(self.costs, dtype=float, copy=True).reshape(-1)
        if c.size == 0:
            raise EmptyDatabase("cost database is empty")
        if not np.all(np.isfinite(c)) or np.any(c < 0):
            raise ValueError("database costs must be finite and non-negative")
        if self.tours is not None:
            if len(self.tours) != c.size:
                raise ValueError("one tour per cost entry required")
            if len(set(self.tours)) != len(self.tours):
                raise ValueError("database tours must be distinct")
        c.setflags(write=False)
        object.__setattr__(self, "costs", c)

    @classmethod
    def from_outcomes(cls, outcomes: Sequence, exact: Sequence[float] | None = None):
        """Database of decoded QPE costs, or of ``exact`` costs for diagnostics."""
        if not outcomes:
            raise EmptyDatabase("no routes to search")
        costs = exact if exact is not None else [o.cost for o in outcomes]
        return cls(np.asarray(costs, dtype=float), tuple(o.tour for o in outcomes))

    @property
    def size(self) -> int:
        return self.costs.size

    def tour(self, index: int) -> Tour | None:
        return None if self.tours is None else self.tours[index]

    @cached_property
    def engine(self) -> GroverEngine:
        return GroverEngine(self.size)

    def marked_below(self, threshold: float) -> np.ndarray:
        return self.costs < threshold


@dataclass(frozen=True)
class SearchResult:
    index: int
    min_tour: Tour | None
    min_cost: float
    oracle_queries: int
    grover_iterations: int
    seed: int | None
    queries_to_best: int = 0


@dataclass
class GroverRun:
    index: int | None
    oracle_queries: int = 0
    grover_iterations: int = 0
    measurements: int = 0


def classical_argmin(db: CostDatabase) -> SearchResult:
    """Linear scan; the first of several tied minima wins."""
    i = int(np.argmin(db.costs))
    return SearchResult(i, db.tour(i), float(db.costs[i]), db.size, 0, None, i + 1)


def _bbht(
    db: CostDatabase,
    engine: GroverEngine,
    threshold: float,
    rng: random.Random,
    budget: int,
) -> GroverRun:
    marked = db.marked_below(threshold)
    run = GroverRun(None)
    cutoff = 1.0
    cap = math.sqrt(engine.size)
    while run.oracle_queries < budget:
        j = rng.randrange(math.ceil(cutoff))
        i = engine.measure(marked, j, rng)
        run.grover_iterations += j
        run.measurements += 1
        run.oracle_queries += j + 1
        if i < db.size and marked[i]:
            run.index = i
            return run
        cutoff = min(GROWTH * cutoff, cap)
    return run


def grover_search_below(
    db: CostDatabase,
    threshold: float,
    seed: int | None = None,
    budget: int | None = None,
    engine: GroverEngine | None = None,
) -> GroverRun:
    """Exponential Grover search for an index with ``cost < threshold``.

    Gives up once ``budget`` oracle queries are spent; ``index`` is then None.
    """
    engine = engine or db.engine
    budget = query_budget(db.size) if budget is None else budget
    return _bbht(db, engine, threshold, random.Random(seed), budget)


def durr_hoyer_minimum(
    db: CostDatabase,
    seed: int | None = None,
    confidence: float = 0.999,
    engine: GroverEngine | None = None,
    budget: int | None = None,
) -> SearchResult:
    """Threshold-descent minimum finding, repeated to reach ``confidence``.

    A single run stops when its query budget is used up. Ties may resolve
    to any of the tied entries.
    """
    reps = repetitions(confidence)
    if db.size == 1:
        return SearchResult(0, db.tour(0), float(db.costs[0]), 0, 0, seed, 0)
    engine = engine or db.engine
    budget = query_budget(db.size) if budget is None else budget
    rng = random.Random(seed)
    queries = iterations = 0
    best: int | None = None
    best_at = 0
    for _ in range(reps):
        y = rng.randrange(db.size)
        spent = 0
        if best is None or db.costs[y] < db.costs[best]:
            best, best_at = y, queries
        while spent < budget:
            run = _bbht(db, engine, float(db.costs[y]), rng, budget - spent)
            spent += run.oracle_queries
            iterations += run.grover_iterations
            if run.index is not None and db.costs[run.index] < db.costs[y]:
                y = run.index
                if db.costs[y] < db.costs[best]:
                    best, best_at = y, queries + spent
        queries += spent
    return SearchResult(
        best, db.tour(best), float(db.costs[best]), queries, iterations, seed, best_at
    )
