"""Classical ground truth by exhaustive enumeration of Hamiltonian cycles."""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations

from .encoding import Tour, tour_to_eigenstate
from .errors import MissingEdge, TooManyCities
from .instance import TspInstance, normalize

MAX_CITIES = 8


def enumerate_tours(n: int, dedup_symmetric: bool = False) -> list[Tour]:
    """Canonical tours from city 1 in lexicographic order.

    With ``dedup_symmetric`` only the lexicographically smaller member of each
    reversal pair is kept.
    """
    if n < 2:
        raise ValueError(f"need at least 2 cities, got {n}")
    if n > MAX_CITIES:
        raise TooManyCities(f"{n} cities exceeds the enumeration cap of {MAX_CITIES}")
    tours = []
    for rest in permutations(range(2, n + 1)):
        t = Tour((1,) + rest)
        if dedup_symmetric and t.reversed() < t:
            continue
        tours.append(t)
    return tours


def tour_cost(tour: Tour, instance: TspInstance) -> float:
    total = 0.0
    for a, b in tour.legs():
        if (a, b) in instance.missing:
            raise MissingEdge(f"tour {tour} uses missing edge ({a + 1},{b + 1})")
        total += float(instance.costs[a, b])
    return total


def brute_force_solve(instance: TspInstance) -> tuple[Tour, float]:
    """Exact optimum; ties go to the earliest tour in canonical order."""
    best: tuple[Tour, float] | None = None
    for t in enumerate_tours(instance.n):
        c = tour_cost(t, instance)
        if best is None or c < best[1]:
            best = (t, c)
    assert best is not None
    return best


def expected_bitstring(phase: float, t: int) -> str:
    """Nearest ``t``-bit phase bin, wrapping ``2**t`` back to 0."""
    k = math.floor(phase / (2 * math.pi) * 2**t + 0.5) % 2**t
    return format(k, f"0{t}b")


@dataclass(frozen=True)
class TourRow:
    tour: Tour
    cost: float
    phase: float
    eigenstate: str
    expected: str


def build_tour_table(
    instance: TspInstance, t: int, dedup_symmetric: bool = False
) -> list[TourRow]:
    """One row per tour: exact cost and phase, eigenstate bits, expected QPE readout."""
    phases = normalize(instance, t)
    rows = []
    for tour in enumerate_tours(instance.n, dedup_symmetric):
        cost = tour_cost(tour, instance)
        ph = sum(float(phases.phi[a, b]) for a, b in tour.legs())
        rows.append(
            TourRow(tour, cost, ph, tour_to_eigenstate(tour).bits, expected_bitstring(ph, t))
        )
    return rows
