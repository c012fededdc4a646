"""End-to-end pipeline and its report.

normalize -> phase estimation of every route -> minimum search, with the
brute-force oracle alongside for the exact columns.
"""
from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field

from .encoding import TourPhaseOperator, build_phase_operator
from .instance import PhaseMap, TspInstance, apply_penalty, normalize, validate
from .minsearch import CostDatabase, SearchResult, durr_hoyer_minimum
from .oracle import brute_force_solve, expected_bitstring, tour_cost
from .qpe import QpeConfig, quantization, run_all_routes

# slack for float noise when checking |decoded - exact| against one bin
_TOL_SLACK = 1e-9


@dataclass(frozen=True)
class RouteRow:
    tour: str
    eigenstate: str
    readout: str
    probability: float
    phase: float
    cost: float
    exact_cost: float
    exact_phase: float
    error: float
    expected: str
    reference: str | None = None


@dataclass
class RunReport:
    name: str
    config: dict
    scale: float
    resolution: float
    rows: list[RouteRow]
    search: dict
    brute: dict
    notes: list[str] = field(default_factory=list)
    timings: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def prepare(instance: TspInstance, t: int) -> tuple[TspInstance, PhaseMap, TourPhaseOperator]:
    """Validate, substitute penalties, normalize and build the operator."""
    validate(instance).raise_if_invalid()
    work = apply_penalty(instance)
    phases = normalize(work, t)
    return work, phases, build_phase_operator(phases)


def _search_dict(res: SearchResult) -> dict:
    return {
        "tour": str(res.min_tour),
        "cost": res.min_cost,
        "phase": None,
        "oracle_queries": res.oracle_queries,
        "grover_iterations": res.grover_iterations,
        "seed": res.seed,
    }


def solve(
    instance: TspInstance,
    config: QpeConfig,
    *,
    dedup: bool = False,
    confidence: float = 0.999,
    exact_search: bool = False,
    reference: dict[str, str] | None = None,
) -> RunReport:
    timings: dict[str, float] = {}
    t = config.phase_qubits
    clock = time.perf_counter()
    work, phases, op = prepare(instance, t)
    timings["normalize"] = time.perf_counter() - clock

    clock = time.perf_counter()
    outcomes = run_all_routes(op, phases, config, dedup=dedup and instance.symmetric)
    timings["qpe"] = time.perf_counter() - clock

    rows = []
    notes = []
    exact_costs = []
    for o in outcomes:
        exact = tour_cost(o.tour, work)
        exact_phase = sum(float(phases.phi[a, b]) for a, b in o.tour.legs())
        exact_costs.append(exact)
        expected = expected_bitstring(exact_phase, t)
        ref = None if reference is None else reference.get(o.eigenstate)
        rows.append(
            RouteRow(
                str(o.tour), o.eigenstate, o.bitstring, o.probability, o.phase, o.cost,
                exact, exact_phase, abs(o.cost - exact), expected, ref,
            )
        )
        if ref is not None and ref != o.bitstring:
            notes.append(
                f"route {o.tour}: readout {o.bitstring} differs from reference {ref}; "
                f"classical phase sum {exact_phase!r} rad = "
                f"{exact_phase / (2 * math.pi) * 2**t:g}/{2**t} of 2*pi -> {expected}"
            )

    clock = time.perf_counter()
    db = CostDatabase.from_outcomes(outcomes, exact_costs if exact_search else None)
    found = durr_hoyer_minimum(db, seed=config.seed, confidence=confidence)
    timings["search"] = time.perf_counter() - clock

    clock = time.perf_counter()
    best_tour, best_cost = brute_force_solve(work)
    timings["brute"] = time.perf_counter() - clock

    search = _search_dict(found)
    search["phase"] = found.min_cost * phases.scale
    search["exact_cost"] = tour_cost(found.min_tour, work)
    search["costs"] = "exact" if exact_search else "decoded"
    cfg = {
        "t": t,
        "n_bits": config.n_bits,
        "epsilon": config.epsilon,
        "backend": config.backend,
        "shots": config.shots,
        "seed": config.seed,
        "dedup_symmetric": dedup and instance.symmetric,
        "confidence": confidence,
        "penalty_applied": phases.penalty_applied,
    }
    return RunReport(
        name=instance.name,
        config=cfg,
        scale=phases.scale,
        resolution=quantization(t, phases.scale),
        rows=rows,
        search=search,
        brute={"tour": str(best_tour), "cost": best_cost},
        notes=notes,
        timings=timings,
    )


def mismatches(report: RunReport) -> list[str]:
    """Disagreements between the quantum path and the oracle beyond one phase bin."""
    tol = report.resolution * (1 + _TOL_SLACK)
    out = []
    for row in report.rows:
        if row.error > tol:
            out.append(f"route {row.tour}: decoded cost {row.cost} vs exact {row.exact_cost}")
    if abs(report.search["cost"] - report.brute["cost"]) > tol:
        out.append(
            f"minimum: search found {report.search['tour']} at {report.search['cost']}, "
            f"brute force {report.brute['tour']} at {report.brute['cost']}"
        )
    return out


def format_text(report: RunReport) -> str:
    cfg = report.config
    head = (
        f"{'#':>3}  {'Tour':<14} {'Eigenstate':<{max(10, len(report.rows[0].eigenstate))}} "
        f"{'Expected':<9} {'Readout':<9} {'Prob':>6}  {'Phase':>9}  {'Cost':>10}  "
        f"{'Exact':>10}  {'|err|':>9}"
    )
    has_ref = any(r.reference is not None for r in report.rows)
    if has_ref:
        head += "  Reference"
    lines = [
        f"instance {report.name}: t={cfg['t']} backend={cfg['backend']} seed={cfg['seed']}"
        f" scale={report.scale:.6g} rad/unit resolution={report.resolution:.6g}",
        head,
        "-" * len(head),
    ]
    w = max(10, len(report.rows[0].eigenstate))
    for i, r in enumerate(report.rows, 1):
        line = (
            f"{i:>3}  {r.tour:<14} {r.eigenstate:<{w}} {r.expected:<9} {r.readout:<9} "
            f"{r.probability:>6.3f}  {r.phase:>9.6f}  {r.cost:>10.6g}  {r.exact_cost:>10.6g}  "
            f"{r.error:>9.3g}"
        )
        if has_ref:
            line += f"  {r.reference or '-'}"
        lines.append(line)
    s, b = report.search, report.brute
    lines += [
        "",
        f"minimum search ({s['costs']} costs): tour {s['tour']} cost {s['cost']:.6g} "
        f"(phase {s['phase']:.6f} rad), {s['oracle_queries']} oracle queries, "
        f"{s['grover_iterations']} Grover iterations",
        f"brute force: tour {b['tour']} cost {b['cost']:.6g}",
    ]
    if report.notes:
        lines.append("")
        lines += [f"note: {n}" for n in report.notes]
    if report.timings:
        lines.append(
            "timings: " + ", ".join(f"{k} {v:.3f}s" for k, v in report.timings.items())
        )
    return "\n".join(lines)
