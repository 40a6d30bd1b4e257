"""Gate-level circuit representation, depth analysis and gate counting.

Qubits are global integer indices.  A circuit carries named registers that
partition ``range(qubit_count)`` into contiguous blocks; stage circuits can be
embedded into a larger layout by matching register names.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

__all__ = [
    "GateKind",
    "Gate",
    "Register",
    "Circuit",
    "CircuitBuilder",
    "ResourceReport",
    "Stage",
    "depth",
    "count_gates",
    "predict_resources",
]


class GateKind(str, Enum):
    X = "X"
    Z = "Z"
    H = "H"
    RX = "RX"
    RY = "RY"
    RZ = "RZ"
    CRY = "CRY"
    CCRY = "CCRY"
    CNOT = "CNOT"
    SWAP = "SWAP"
    MCX = "MCX"

    def __str__(self) -> str:
        return self.value


_ARITY = {
    GateKind.X: 1,
    GateKind.Z: 1,
    GateKind.H: 1,
    GateKind.RX: 1,
    GateKind.RY: 1,
    GateKind.RZ: 1,
    GateKind.CRY: 2,
    GateKind.CNOT: 2,
    GateKind.SWAP: 2,
    GateKind.CCRY: 3,
}
PARAMETRIC = frozenset({GateKind.RX, GateKind.RY, GateKind.RZ, GateKind.CRY, GateKind.CCRY})


@dataclass(frozen=True)
class Gate:
    """A gate application.  Controls come before the target in ``qubits``."""

    kind: GateKind
    qubits: tuple[int, ...]
    theta: float | None = None

    def __post_init__(self):
        kind = GateKind(self.kind)
        object.__setattr__(self, "kind", kind)
        qubits = tuple(int(q) for q in self.qubits)
        object.__setattr__(self, "qubits", qubits)
        if len(set(qubits)) != len(qubits):
            raise ValueError(f"{kind}: qubit indices must be distinct, got {qubits}")
        if any(q < 0 for q in qubits):
            raise ValueError(f"{kind}: negative qubit index")
        if kind is GateKind.MCX:
            if len(qubits) < 2:
                raise ValueError("MCX needs at least one control")
        elif len(qubits) != _ARITY[kind]:
            raise ValueError(f"{kind} acts on {_ARITY[kind]} qubits, got {len(qubits)}")
        if kind in PARAMETRIC:
            if self.theta is None:
                raise ValueError(f"{kind} needs an angle")
            object.__setattr__(self, "theta", float(self.theta))
        elif self.theta is not None:
            raise ValueError(f"{kind} takes no angle")

    @property
    def controls(self) -> tuple[int, ...]:
        if self.kind in (GateKind.CRY, GateKind.CCRY, GateKind.CNOT, GateKind.MCX):
            return self.qubits[:-1]
        return ()

    @property
    def target(self) -> int:
        return self.qubits[-1]

    def inverse(self) -> "Gate":
        if self.kind in PARAMETRIC:
            return Gate(self.kind, self.qubits, -self.theta)
        return self

    def remap(self, mapping) -> "Gate":
        return Gate(self.kind, tuple(mapping(q) for q in self.qubits), self.theta)

    def __str__(self) -> str:
        parts = [self.kind.value, *map(str, self.qubits)]
        if self.theta is not None:
            parts.append(repr(self.theta))
        return " ".join(parts)

    @classmethod
    def parse(cls, line: str) -> "Gate":
        toks = line.split()
        kind = GateKind(toks[0])
        if kind in PARAMETRIC:
            return cls(kind, tuple(int(t) for t in toks[1:-1]), float(toks[-1]))
        return cls(kind, tuple(int(t) for t in toks[1:]))


@dataclass(frozen=True)
class Register:
    name: str
    offset: int
    size: int

    def __post_init__(self):
        if self.size < 1 or self.offset < 0:
            raise ValueError(f"invalid register {self.name}: offset={self.offset} size={self.size}")

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.size:
            raise IndexError(f"{self.name}[{i}] out of range (size {self.size})")
        return self.offset + i

    def __iter__(self):
        return iter(range(self.offset, self.offset + self.size))

    def __len__(self) -> int:
        return self.size


def _check_layout(registers: Sequence[Register], qubit_count: int) -> None:
    pos = 0
    names = set()
    for reg in sorted(registers, key=lambda r: r.offset):
        if reg.name in names:
            raise ValueError(f"duplicate register name {reg.name!r}")
        names.add(reg.name)
        if reg.offset != pos:
            raise ValueError("registers must be disjoint and contiguous")
        pos += reg.size
    if registers and pos != qubit_count:
        raise ValueError(f"registers cover {pos} qubits, circuit has {qubit_count}")


@dataclass(frozen=True)
class Circuit:
    registers: tuple[Register, ...]
    gates: tuple[Gate, ...]
    qubit_count: int

    def __post_init__(self):
        _check_layout(self.registers, self.qubit_count)
        for g in self.gates:
            if max(g.qubits) >= self.qubit_count:
                raise ValueError(f"gate {g} outside {self.qubit_count}-qubit circuit")

    @classmethod
    def empty(cls, registers: Sequence[Register]) -> "Circuit":
        return cls(tuple(registers), (), sum(r.size for r in registers))

    def register(self, name: str) -> Register:
        for r in self.registers:
            if r.name == name:
                return r
        raise KeyError(name)

    def __len__(self) -> int:
        return len(self.gates)

    def inverse(self) -> "Circuit":
        return Circuit(self.registers, tuple(g.inverse() for g in reversed(self.gates)), self.qubit_count)

    def then(self, other: "Circuit") -> "Circuit":
        """Sequential composition; both circuits must share a layout."""
        if other.registers != self.registers:
            raise ValueError("cannot compose circuits with different register layouts")
        return Circuit(self.registers, self.gates + other.gates, self.qubit_count)

    def embed(self, registers: Sequence[Register]) -> "Circuit":
        """Re-express this circuit on a larger layout, matching registers by name."""
        target = {r.name: r for r in registers}
        shift = {}
        for r in self.registers:
            if r.name not in target:
                raise KeyError(f"layout has no register {r.name!r}")
            if target[r.name].size < r.size:
                raise ValueError(f"register {r.name!r} does not fit")
            shift[r.name] = (r, target[r.name].offset)

        def mapping(q: int) -> int:
            for r, off in shift.values():
                if r.offset <= q < r.offset + r.size:
                    return off + (q - r.offset)
            raise AssertionError(q)

        total = sum(r.size for r in registers)
        return Circuit(tuple(registers), tuple(g.remap(mapping) for g in self.gates), total)

    def dump(self) -> str:
        return "".join(str(g) + "\n" for g in self.gates)

    @classmethod
    def load(cls, text: str, registers: Sequence[Register]) -> "Circuit":
        gates = tuple(Gate.parse(ln) for ln in text.splitlines() if ln.strip())
        return cls(tuple(registers), gates, sum(r.size for r in registers))


class CircuitBuilder:
    """Mutable, single-owner accumulator producing an immutable Circuit."""

    def __init__(self, registers: Sequence[Register]):
        self.registers = tuple(registers)
        self.qubit_count = sum(r.size for r in registers)
        _check_layout(self.registers, self.qubit_count)
        self._gates: list[Gate] = []

    def add(self, gate: Gate) -> "CircuitBuilder":
        if max(gate.qubits) >= self.qubit_count:
            raise ValueError(f"gate {gate} outside {self.qubit_count}-qubit circuit")
        self._gates.append(gate)
        return self

    def extend(self, gates: Iterable[Gate]) -> "CircuitBuilder":
        for g in gates:
            self.add(g)
        return self

    def x(self, q):
        return self.add(Gate(GateKind.X, (q,)))

    def z(self, q):
        return self.add(Gate(GateKind.Z, (q,)))

    def h(self, q):
        return self.add(Gate(GateKind.H, (q,)))

    def ry(self, q, theta):
        return self.add(Gate(GateKind.RY, (q,), theta))

    def cry(self, c, t, theta):
        return self.add(Gate(GateKind.CRY, (c, t), theta))

    def ccry(self, c1, c2, t, theta):
        return self.add(Gate(GateKind.CCRY, (c1, c2, t), theta))

    def cnot(self, c, t):
        return self.add(Gate(GateKind.CNOT, (c, t)))

    def swap(self, a, b):
        return self.add(Gate(GateKind.SWAP, (a, b)))

    def mcx(self, controls, t):
        return self.add(Gate(GateKind.MCX, (*controls, t)))

    def build(self) -> Circuit:
        return Circuit(self.registers, tuple(self._gates), self.qubit_count)


def depth(c: Circuit) -> int:
    """ASAP layer count: gates on disjoint qubits share a layer."""
    level = [0] * c.qubit_count
    total = 0
    for g in c.gates:
        layer = max(level[q] for q in g.qubits) + 1
        for q in g.qubits:
            level[q] = layer
        total = max(total, layer)
    return total


class Stage(str, Enum):
    UAE = "uae"
    DICKE = "dicke"
    PHASE = "phase"
    CONSTRAINT = "constraint"
    GJE = "gje"
    LOOKUP = "lookup"
    HADAMARD = "hadamard"

    @property
    def title(self) -> str:
        return _TITLES[self]


_TITLES = {
    Stage.UAE: "Unary Amplitude Encoding",
    Stage.DICKE: "Dicke State Preparation",
    Stage.PHASE: "Phase Encoding",
    Stage.CONSTRAINT: "Constraint Encoding",
    Stage.GJE: "Decoding (GJE)",
    Stage.LOOKUP: "Decoding (Lookup Table)",
    Stage.HADAMARD: "Hadamard Transform",
}


@dataclass
class ResourceReport:
    stage: str
    counts: dict[str, int]
    depth: int
    qubits: int
    bound_flags: dict[str, bool] = field(default_factory=dict)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def count(self, kind) -> int:
        return self.counts.get(str(kind), 0)

    def to_dict(self) -> dict:
        return {
            "stage": self.stage,
            "counts": dict(sorted(self.counts.items())),
            "depth": self.depth,
            "qubits": self.qubits,
            "bound_flags": dict(sorted(self.bound_flags.items())),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "ResourceReport":
        return cls(d["stage"], dict(d["counts"]), d["depth"], d["qubits"], dict(d.get("bound_flags", {})))


def count_gates(c: Circuit, stage: str = "") -> ResourceReport:
    counts: dict[str, int] = {}
    for g in c.gates:
        counts[g.kind.value] = counts.get(g.kind.value, 0) + 1
    return ResourceReport(str(stage), counts, depth(c), c.qubit_count)


def _lookup_entries(n: int, ell: int) -> int:
    return sum(math.comb(n, r) for r in range(ell + 1))


def predict_resources(stage, m: int, n: int, ell: int) -> ResourceReport:
    """Closed-form gate counts, depth and width from the complexity table.

    Entries that are upper bounds rather than exact counts are flagged in
    ``bound_flags`` (key = gate kind or ``"depth"``).
    """
    stage = Stage(stage)
    if not 1 <= ell <= m:
        raise ValueError(f"need 1 <= ell <= m, got ell={ell}, m={m}")
    if n < 1:
        raise ValueError("n must be positive")
    K = GateKind
    if stage is Stage.UAE:
        counts = {K.RY: 2 * ell + 1, K.CNOT: 2 * ell}
        d, q, bounds = 3 * ell + 1, 2 ** math.ceil(math.log2(ell + 1)), {}
    elif stage is Stage.DICKE:
        counts = {
            K.CNOT: 10 * m * ell - 6 * m - 5 * ell**2 - 5 * ell + 6,
            K.RY: 6 * m * ell - 4 * m - 3 * ell**2 - 3 * ell + 4,
        }
        d, q, bounds = (m - 1) * (16 * ell - 10), m, {"depth": True}
    elif stage is Stage.PHASE:
        counts = {K.Z: m}
        d, q, bounds = 1, m, {K.Z.value: True}
    elif stage is Stage.CONSTRAINT:
        counts = {K.CNOT: m * n}
        d, q, bounds = m * n, m + n, {K.CNOT.value: True, "depth": True}
    elif stage is Stage.GJE:
        counts = {K.CNOT: m * n, K.SWAP: n}
        d, q = n * (m + 1), m + n
        bounds = {K.CNOT.value: True, K.SWAP.value: True, "depth": True}
    elif stage is Stage.LOOKUP:
        s = _lookup_entries(n, ell)
        counts = {K.X: 2 * m * s, K.MCX: m * s}
        d, q = (m + 2) * s, m + n
        bounds = {K.X.value: True, K.MCX.value: True, "depth": True}
    else:
        counts = {K.H: n}
        d, q, bounds = 1, n, {}
    flags = {k.value: bounds.get(k.value, False) for k in counts}
    flags["depth"] = bounds.get("depth", False)
    return ResourceReport(stage.value, {k.value: v for k, v in counts.items()}, d, q, flags)
