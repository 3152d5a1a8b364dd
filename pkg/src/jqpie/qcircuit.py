"""Gate-level circuit representation with exact resource accounting.

Gate alphabet: RY/RZ rotations, X, CX, plus two operator-level entries that
the simulator can apply directly: PERM (a basis permutation over a qubit
subset) and UBLOCK (a dense unitary over a qubit subset). Operator-level
gates carry declared cost-model constants (cx, rotations, depth) so resource
reports stay meaningful without lowering them.

Conventions (project-wide):
  * qubit 0 is the least-significant bit of a basis index;
  * registers are listed most-significant first, e.g.
    (("ancilla", 1), ("index", k), ("data", 6)) puts the data register in
    qubits 0..5 and the ancilla at the top;
  * PERM/UBLOCK target lists are ordered most-significant-first with respect
    to the operator's own basis index.

Depth model: greedy as-soon-as-possible scheduling where each elementary
gate occupies one time step on every touched qubit and operator-level gates
advance their qubits by the declared depth. Consecutive runs of gates with
different stage tags are scheduled with a barrier in between, so a report's
total depth is the sum of its per-stage depths.

Circuits are immutable values; resource computation and export are pure.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

import numpy as np

ELEMENTARY_KINDS = ("ry", "rz", "x", "cx")
BLOCK_KINDS = ("perm", "ublock")

#: Breakdown keys always present in a resource report.
PIPELINE_STAGES = ("state_prep", "inverse_zigzag", "inverse_quantization", "inverse_qdct")


class UnloweredGateError(ValueError):
    """An operator-level gate appeared where only elementary gates are valid."""


@dataclass(frozen=True, eq=False)
class Gate:
    kind: str
    qubits: tuple[int, ...]
    angle: float | None = None
    matrix: np.ndarray | None = None
    perm: tuple[int, ...] | None = None
    cost: tuple[int, int, int] = (0, 0, 0)   # declared (cx, rotations, depth)
    tag: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"duplicate qubits in gate: {self.qubits}")
        if self.kind in ("ry", "rz"):
            if len(self.qubits) != 1 or self.angle is None:
                raise ValueError(f"{self.kind} takes one qubit and an angle")
        elif self.kind == "x":
            if len(self.qubits) != 1:
                raise ValueError("x takes exactly one qubit")
        elif self.kind == "cx":
            if len(self.qubits) != 2:
                raise ValueError("cx takes a distinct (control, target) pair")
        elif self.kind == "perm":
            if self.perm is None:
                raise ValueError("perm gate needs an index map")
            perm = tuple(int(p) for p in self.perm)
            dim = 2 ** len(self.qubits)
            if sorted(perm) != list(range(dim)):
                raise ValueError("perm map must be a bijection on the target subspace")
            object.__setattr__(self, "perm", perm)
        elif self.kind == "ublock":
            if self.matrix is None:
                raise ValueError("ublock gate needs a matrix")
            mat = np.asarray(self.matrix, dtype=np.complex128)
            dim = 2 ** len(self.qubits)
            if mat.shape != (dim, dim):
                raise ValueError(f"ublock matrix must be {dim}x{dim}")
            if not np.allclose(mat @ mat.conj().T, np.eye(dim), atol=1e-12):
                raise ValueError("ublock matrix is not unitary within 1e-12")
            mat = mat.copy()
            mat.flags.writeable = False
            object.__setattr__(self, "matrix", mat)
        else:
            raise ValueError(f"unknown gate kind {self.kind!r}")

    @property
    def is_elementary(self) -> bool:
        return self.kind in ELEMENTARY_KINDS


def ry(qubit: int, angle: float, tag: str | None = None) -> Gate:
    return Gate("ry", (qubit,), angle=float(angle), tag=tag)


def rz(qubit: int, angle: float, tag: str | None = None) -> Gate:
    return Gate("rz", (qubit,), angle=float(angle), tag=tag)


def x(qubit: int, tag: str | None = None) -> Gate:
    return Gate("x", (qubit,), tag=tag)


def cx(control: int, target: int, tag: str | None = None) -> Gate:
    return Gate("cx", (control, target), tag=tag)


def perm_gate(targets, mapping, cost=(0, 0, 0), tag: str | None = None) -> Gate:
    """Basis permutation |k> -> |mapping[k]> on ``targets`` (MSB first)."""
    return Gate("perm", tuple(targets), perm=tuple(mapping), cost=tuple(cost), tag=tag)


def ublock(targets, matrix, cost=(0, 0, 0), tag: str | None = None) -> Gate:
    """Dense unitary on ``targets`` (MSB first) with declared cost constants."""
    return Gate("ublock", tuple(targets), matrix=matrix, cost=tuple(cost), tag=tag)


def gates_equal(a: Gate, b: Gate, atol: float = 1e-12) -> bool:
    if a.kind != b.kind or a.qubits != b.qubits:
        return False
    if a.angle is None and b.angle is None:
        angle_ok = True
    elif a.angle is None or b.angle is None:
        angle_ok = False
    else:
        angle_ok = abs(a.angle - b.angle) <= atol
    if a.perm != b.perm:
        return False
    if (a.matrix is None) != (b.matrix is None):
        return False
    if a.matrix is not None and not np.allclose(a.matrix, b.matrix, atol=atol):
        return False
    return angle_ok


@dataclass(frozen=True)
class Circuit:
    """An ordered gate sequence over named qubit registers."""

    n_qubits: int
    gates: tuple[Gate, ...] = ()
    registers: tuple[tuple[str, int], ...] = ()   # most-significant first

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        regs = tuple((str(n), int(s)) for n, s in self.registers)
        if not regs:
            regs = (("q", self.n_qubits),)
        if sum(s for _, s in regs) != self.n_qubits:
            raise ValueError("register sizes must sum to the qubit count")
        object.__setattr__(self, "registers", regs)
        for g in self.gates:
            for q in g.qubits:
                if not 0 <= q < self.n_qubits:
                    raise ValueError(f"gate references qubit {q} outside 0..{self.n_qubits - 1}")

    def register_qubits(self, name: str) -> list[int]:
        """Qubit indices of a register, most-significant first."""
        top = self.n_qubits
        for reg_name, size in self.registers:
            if reg_name == name:
                return list(range(top - 1, top - size - 1, -1))
            top -= size
        raise KeyError(f"no register named {name!r}")

    @property
    def has_operator_gates(self) -> bool:
        return any(not g.is_elementary for g in self.gates)

    def tagged(self, tag: str) -> "Circuit":
        """Copy with every untagged gate labelled ``tag``."""
        gates = tuple(
            g if g.tag is not None else Gate(g.kind, g.qubits, g.angle, g.matrix, g.perm, g.cost, tag)
            for g in self.gates
        )
        return Circuit(self.n_qubits, gates, self.registers)


def compose(a: Circuit, b: Circuit) -> Circuit:
    """Concatenate two circuits over the identical register layout."""
    if a.n_qubits != b.n_qubits or a.registers != b.registers:
        raise ValueError("register layouts do not match")
    return Circuit(a.n_qubits, a.gates + b.gates, a.registers)


@dataclass(frozen=True)
class StageCost:
    cx: int = 0
    rotations: int = 0
    depth: int = 0

    def __add__(self, other: "StageCost") -> "StageCost":
        return StageCost(self.cx + other.cx, self.rotations + other.rotations,
                         self.depth + other.depth)


@dataclass(frozen=True)
class ResourceReport:
    cx_count: int
    rotation_count: int
    depth: int
    breakdown: dict

    def __post_init__(self):
        bd = dict(self.breakdown)
        for stage in PIPELINE_STAGES:
            bd.setdefault(stage, StageCost())
        object.__setattr__(self, "breakdown", bd)

    def to_json(self) -> dict:
        return {
            "cx_count": self.cx_count,
            "rotation_count": self.rotation_count,
            "depth": self.depth,
            "breakdown": {
                name: {"cx": c.cx, "rotations": c.rotations, "depth": c.depth}
                for name, c in sorted(self.breakdown.items())
            },
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)


def _gate_cost(gate: Gate) -> tuple[int, int, int]:
    """(cx, rotations, time-weight) contributed by one gate."""
    if gate.kind == "cx":
        return 1, 0, 1
    if gate.kind in ("ry", "rz"):
        return 0, 1, 1
    if gate.kind == "x":
        return 0, 0, 1
    return gate.cost[0], gate.cost[1], gate.cost[2]


def schedule_depth(gates) -> int:
    """ASAP depth of a gate sequence (one step per qubit per elementary gate)."""
    front: dict[int, int] = {}
    depth = 0
    for g in gates:
        _, _, w = _gate_cost(g)
        start = max((front.get(q, 0) for q in g.qubits), default=0)
        end = start + w
        for q in g.qubits:
            front[q] = end
        depth = max(depth, end)
    return depth


def resource_counts(circuit: Circuit) -> ResourceReport:
    """Exact gate counts and scheduled depth, broken down by stage tag.

    Counts for PERM/UBLOCK come from their declared cost constants. Stage
    segments (consecutive gates sharing a tag) are scheduled independently
    and act as barriers, so the total depth equals the breakdown sum.
    """
    segments: list[tuple[str, list[Gate]]] = []
    for g in circuit.gates:
        tag = g.tag or "other"
        if segments and segments[-1][0] == tag:
            segments[-1][1].append(g)
        else:
            segments.append((tag, [g]))

    totals: dict[str, StageCost] = {}
    for tag, gates in segments:
        cx_n = rot_n = 0
        for g in gates:
            c, r, _ = _gate_cost(g)
            cx_n += c
            rot_n += r
        cost = StageCost(cx_n, rot_n, schedule_depth(gates))
        totals[tag] = totals.get(tag, StageCost()) + cost

    total = StageCost()
    for cost in totals.values():
        total = total + cost
    return ResourceReport(total.cx, total.rotations, total.depth, totals)


# --- OpenQASM 3 export / import (elementary subset) -------------------------

_QASM_HEADER = 'OPENQASM 3.0;\ninclude "stdgates.inc";\n'


def export_qasm(circuit: Circuit) -> str:
    """Serialize an elementary-gate circuit to OpenQASM 3 text.

    Operator-level gates have no textual form here; lower them first.
    """
    if circuit.has_operator_gates:
        raise UnloweredGateError("circuit contains PERM/UBLOCK gates: lower before export")
    lines = [_QASM_HEADER + f"qubit[{circuit.n_qubits}] q;"]
    for g in circuit.gates:
        if g.kind in ("ry", "rz"):
            lines.append(f"{g.kind}({g.angle!r}) q[{g.qubits[0]}];")
        elif g.kind == "x":
            lines.append(f"x q[{g.qubits[0]}];")
        else:
            lines.append(f"cx q[{g.qubits[0]}], q[{g.qubits[1]}];")
    return "\n".join(lines) + "\n"


_QASM_GATE_RE = re.compile(
    r"^(?P<kind>ry|rz|x|cx)\s*(?:\((?P<angle>[^)]+)\))?\s*"
    r"q\[(?P<q0>\d+)\]\s*(?:,\s*q\[(?P<q1>\d+)\])?\s*;$"
)
_QASM_DECL_RE = re.compile(r"^qubit\[(\d+)\]\s+\w+\s*;$")


def parse_qasm(text: str) -> Circuit:
    """Parse the OpenQASM 3 subset produced by :func:`export_qasm`."""
    n_qubits = None
    gates: list[Gate] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("//"):
            continue
        if line.startswith("OPENQASM") or line.startswith("include"):
            continue
        decl = _QASM_DECL_RE.match(line)
        if decl:
            n_qubits = int(decl.group(1))
            continue
        m = _QASM_GATE_RE.match(line)
        if not m:
            raise ValueError(f"cannot parse QASM statement: {line!r}")
        kind = m.group("kind")
        q0 = int(m.group("q0"))
        if kind in ("ry", "rz"):
            gates.append(Gate(kind, (q0,), angle=float(m.group("angle"))))
        elif kind == "x":
            gates.append(Gate("x", (q0,)))
        else:
            if m.group("q1") is None:
                raise ValueError(f"cx needs two operands: {line!r}")
            gates.append(Gate("cx", (q0, int(m.group("q1")))))
    if n_qubits is None:
        raise ValueError("missing qubit declaration")
    return Circuit(n_qubits, tuple(gates))
