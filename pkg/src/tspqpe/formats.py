"""Instance JSON documents and OpenQASM 2.0 export.

Instance schema::

    {"name": str, "n": int, "mode": "costs" | "phases", "symmetric": bool,
     "matrix": [[number | null, ...], ...],
     "reference_readouts": {"<eigenstate bits>": "<t-bit readout>", ...}}

``null`` marks a missing edge. ``reference_readouts`` is optional; reports
compare against it row by row.
"""
from __future__ import annotations

import json
import re
from importlib import resources
from pathlib import Path

from .encoding import Eigenstate, Gate, TourPhaseOperator
from .errors import ParseError, SchemaError
from .instance import MODES, TspInstance
from .qpe import qpe_sections

_QASM_NAMES = {"x": "x", "h": "h", "p": "u1", "cp": "cu1", "swap": "swap", "cx": "cx"}


def _load_json(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}") from e
    if not isinstance(doc, dict):
        raise SchemaError("instance document must be a JSON object")
    return doc


def parse_instance(text: str) -> TspInstance:
    doc = _load_json(text)
    for key in ("n", "matrix"):
        if key not in doc:
            raise SchemaError(f"missing required field {key!r}")
    n = doc["n"]
    if not isinstance(n, int) or isinstance(n, bool):
        raise SchemaError(f"field 'n' must be an integer, got {n!r}")
    mode = doc.get("mode", "costs")
    if mode not in MODES:
        raise SchemaError(f"field 'mode' must be one of {MODES}, got {mode!r}")
    symmetric = doc.get("symmetric", False)
    if not isinstance(symmetric, bool):
        raise SchemaError("field 'symmetric' must be a boolean")
    name = doc.get("name", "unnamed")
    if not isinstance(name, str):
        raise SchemaError("field 'name' must be a string")
    rows = doc["matrix"]
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise SchemaError("field 'matrix' must be a list of rows")
    if len(rows) != n:
        raise SchemaError(f"matrix has {len(rows)} rows but n={n}")
    for i, row in enumerate(rows):
        if len(row) != n:
            raise SchemaError(f"ragged matrix: row {i + 1} has {len(row)} entries, expected {n}")
        for j, v in enumerate(row):
            if v is not None and (isinstance(v, bool) or not isinstance(v, (int, float))):
                raise SchemaError(f"matrix[{i + 1}][{j + 1}] must be a number or null, got {v!r}")
    return TspInstance.from_rows(rows, symmetric=symmetric, name=name, mode=mode)


def reference_readouts(text: str) -> dict[str, str]:
    ref = _load_json(text).get("reference_readouts", {})
    if not isinstance(ref, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in ref.items()
    ):
        raise SchemaError("field 'reference_readouts' must map bitstrings to bitstrings")
    return dict(ref)


def instance_to_json(instance: TspInstance) -> str:
    rows = [
        [None if (i, j) in instance.missing else float(instance.costs[i, j]) for j in range(instance.n)]
        for i in range(instance.n)
    ]
    doc = {
        "name": instance.name,
        "n": instance.n,
        "mode": instance.mode,
        "symmetric": instance.symmetric,
        "matrix": rows,
    }
    return json.dumps(doc, indent=2)


def read_document(path: str | Path) -> str:
    """Read an instance file, falling back to the bundled fixtures by file name."""
    p = Path(path)
    if p.exists():
        return p.read_text(encoding="utf-8")
    bundled = resources.files("tspqpe") / "data" / p.name
    if bundled.is_file():
        return bundled.read_text(encoding="utf-8")
    raise FileNotFoundError(f"no instance file {str(path)!r}")


def bundled_fixture(name: str) -> str:
    return (resources.files("tspqpe") / "data" / name).read_text(encoding="utf-8")


def _qasm_gate(g: Gate) -> str:
    name = _QASM_NAMES[g.name]
    args = ",".join(f"q[{q}]" for q in g.qubits)
    if g.name in ("p", "cp"):
        return f"{name}({g.angle!r}) {args};"
    return f"{name} {args};"


def export_qasm(op: TourPhaseOperator, eigenstate: Eigenstate, t: int) -> str:
    """Flattened OpenQASM 2.0 for the phase-estimation circuit of one route.

    ``q[0]`` is the most significant readout bit and is measured into
    ``c[t-1]``, so the printed classical register reads in the same order.
    Comments mark the per-factor controlled blocks.
    """
    width = t + op.total_qubits
    r = op.register_qubits
    lines = [
        "OPENQASM 2.0;",
        'include "qelib1.inc";',
        f"// route eigenstate |{eigenstate.bits}>, {op.n} cities, {t} phase qubits",
        f"// q[0..{t - 1}]: phase register; q[{t}..{width - 1}]: eigenstate registers "
        f"({r} qubit(s) per city)",
        f"qreg q[{width}];",
        f"creg c[{t}];",
    ]
    for label, gates in qpe_sections(op, eigenstate, t):
        lines.append(f"// {label}")
        lines.extend(_qasm_gate(g) for g in gates)
    lines.append("// readout")
    lines.extend(f"measure q[{i}] -> c[{t - 1 - i}];" for i in range(t))
    return "\n".join(lines) + "\n"


_GATE_RE = re.compile(r"^(x|h|u1|cu1|swap|cx)(?:\(([^)]*)\))?\s+(.*);$")
_QREG_RE = re.compile(r"^qreg\s+q\[(\d+)\];$")


def parse_qasm(text: str) -> tuple[int, list[Gate]]:
    """Read back the gate list of a document written by :func:`export_qasm`.

    Only that document's vocabulary is understood.
    """
    inverse = {v: k for k, v in _QASM_NAMES.items()}
    width = None
    gates: list[Gate] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("//") or line.startswith(("OPENQASM", "include", "creg", "measure")):
            continue
        m = _QREG_RE.match(line)
        if m:
            width = int(m.group(1))
            continue
        m = _GATE_RE.match(line)
        if not m:
            raise ParseError(f"line {lineno}: unsupported statement {line!r}")
        name, param, args = m.groups()
        qubits = tuple(int(a) for a in re.findall(r"q\[(\d+)\]", args))
        angle = float(param) if param else 0.0
        gates.append(Gate(inverse[name], qubits, angle))
    if width is None:
        raise ParseError("no qreg declaration")
    return width, gates
