"""Exact statevector simulation with a dense and a sparse engine.

Bit ordering: in an ``N``-qubit state, qubit ``q`` is bit ``N - 1 - q`` of the
basis index, so the bitstring label of an index reads qubit 0 first
(``format(index, f"0{N}b")``).  Registers are laid out in offset order, so a
DQI label is the error-register bits followed by the syndrome-register bits.

The sparse engine keeps the amplitude map as a pair of arrays (basis index,
amplitude) with unique indices, and drops entries whose magnitude falls below
``prune`` after each non-permutation gate.

Sampling uses numpy's PCG64 bit generator, which is stable across platforms
for a fixed seed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .circuit import Circuit, Gate, GateKind, Register

__all__ = [
    "QuantumState",
    "MeasurementRecord",
    "PostselectionError",
    "DenseEngine",
    "SparseEngine",
    "AUTO_DENSE_MAX_QUBITS",
    "run",
    "postselect",
    "sample",
    "marginal",
    "gate_matrix",
]

AUTO_DENSE_MAX_QUBITS = 20
DENSE_MAX_QUBITS = 26
SPARSE_MAX_QUBITS = 62
DEFAULT_PRUNE = 1e-14
ZERO_MASS = 1e-20


class PostselectionError(RuntimeError):
    """Raised when the postselected event has (numerically) zero probability."""


def gate_matrix(kind: GateKind, theta: float | None = None) -> np.ndarray:
    """2x2 matrix applied to the target of a (possibly controlled) gate."""
    if kind in (GateKind.X, GateKind.CNOT, GateKind.MCX):
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if kind is GateKind.Z:
        return np.array([[1, 0], [0, -1]], dtype=complex)
    if kind is GateKind.H:
        return np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    if kind in (GateKind.RY, GateKind.CRY, GateKind.CCRY):
        return np.array([[c, -s], [s, c]], dtype=complex)
    if kind is GateKind.RX:
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    if kind is GateKind.RZ:
        return np.array([[c - 1j * s, 0], [0, c + 1j * s]], dtype=complex)
    raise ValueError(f"no 2x2 matrix for {kind}")


_PERMUTATION = frozenset({GateKind.X, GateKind.CNOT, GateKind.MCX})


def _bitstring(index: int, n: int) -> str:
    return format(int(index), f"0{n}b")


@dataclass
class QuantumState:
    """Amplitude map over computational basis states.

    ``indices`` are sorted, unique basis indices; ``amplitudes`` the matching
    complex values.  Basis states absent from ``indices`` have amplitude 0.
    """

    qubit_count: int
    indices: np.ndarray
    amplitudes: np.ndarray

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64)
        amp = np.asarray(self.amplitudes, dtype=np.complex128)
        if idx.shape != amp.shape:
            raise ValueError("indices and amplitudes differ in length")
        order = np.argsort(idx, kind="stable")
        idx, amp = idx[order], amp[order]
        if idx.size > 1 and np.any(idx[1:] == idx[:-1]):
            raise ValueError("duplicate basis indices")
        self.indices, self.amplitudes = idx, amp

    @classmethod
    def basis(cls, qubit_count: int, label: str | int = 0) -> "QuantumState":
        if isinstance(label, str):
            if len(label) != qubit_count or set(label) - {"0", "1"}:
                raise ValueError(f"basis label must be {qubit_count} bits, got {label!r}")
            index = int(label, 2)
        else:
            index = int(label)
            if not 0 <= index < 2**qubit_count:
                raise ValueError("basis index out of range")
        return cls(qubit_count, np.array([index]), np.array([1.0 + 0j]))

    @classmethod
    def from_dense(cls, vec: np.ndarray, drop_zeros: bool = True) -> "QuantumState":
        vec = np.asarray(vec, dtype=np.complex128).ravel()
        n = int(round(math.log2(vec.size)))
        if 2**n != vec.size:
            raise ValueError("vector length is not a power of two")
        idx = np.flatnonzero(vec) if drop_zeros else np.arange(vec.size)
        return cls(n, idx, vec[idx])

    @classmethod
    def from_dict(cls, qubit_count: int, amps: dict) -> "QuantumState":
        keys = [int(k, 2) if isinstance(k, str) else int(k) for k in amps]
        return cls(qubit_count, np.array(keys, dtype=np.int64), np.array(list(amps.values()), dtype=complex))

    def to_dense(self) -> np.ndarray:
        if self.qubit_count > DENSE_MAX_QUBITS:
            raise MemoryError(f"refusing to densify a {self.qubit_count}-qubit state")
        vec = np.zeros(2**self.qubit_count, dtype=np.complex128)
        vec[self.indices] = self.amplitudes
        return vec

    def to_dict(self) -> dict[str, complex]:
        n = self.qubit_count
        return {_bitstring(i, n): complex(a) for i, a in zip(self.indices, self.amplitudes)}

    def amplitude(self, label: str | int) -> complex:
        index = int(label, 2) if isinstance(label, str) else int(label)
        pos = np.searchsorted(self.indices, index)
        if pos < self.indices.size and self.indices[pos] == index:
            return complex(self.amplitudes[pos])
        return 0j

    @property
    def support(self) -> int:
        return int(np.count_nonzero(self.amplitudes))

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amplitudes) ** 2)))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def max_abs_diff(self, other: "QuantumState", up_to_global_phase: bool = False) -> float:
        """Largest per-amplitude difference, optionally after aligning global phase."""
        if other.qubit_count != self.qubit_count:
            raise ValueError("qubit counts differ")
        keys = np.union1d(self.indices, other.indices)
        a = _gather(self, keys)
        b = _gather(other, keys)
        if up_to_global_phase:
            overlap = np.vdot(a, b)
            if abs(overlap) > 0:
                b = b * (abs(overlap) / overlap)
        return float(np.max(np.abs(a - b))) if keys.size else 0.0

    def to_csv(self) -> str:
        """Debug dump: ``bitstring,re,im`` rows sorted by bitstring."""
        n = self.qubit_count
        lines = ["bitstring,re,im"]
        for i, a in zip(self.indices, self.amplitudes):
            lines.append(f"{_bitstring(i, n)},{a.real!r},{a.imag!r}")
        return "\n".join(lines) + "\n"


def _gather(state: QuantumState, keys: np.ndarray) -> np.ndarray:
    out = np.zeros(keys.size, dtype=np.complex128)
    pos = np.searchsorted(keys, state.indices)
    out[pos] = state.amplitudes
    return out


class DenseEngine:
    """Full 2**N amplitude array, reshaped to one axis per qubit."""

    def __init__(self, qubit_count: int):
        if qubit_count > DENSE_MAX_QUBITS:
            raise MemoryError(f"dense engine supports at most {DENSE_MAX_QUBITS} qubits")
        self.n = qubit_count
        self.psi = np.zeros((2,) * qubit_count, dtype=np.complex128)
        self.peak_support = 0

    def load(self, state: QuantumState) -> None:
        self.psi = state.to_dense().reshape((2,) * self.n)

    def state(self) -> QuantumState:
        return QuantumState.from_dense(self.psi.ravel())

    def apply(self, g: Gate) -> None:
        if g.kind is GateKind.SWAP:
            a, b = g.qubits
            self.psi = np.ascontiguousarray(np.swapaxes(self.psi, a, b))
            return
        controls, t = g.controls, g.target
        index: list = [slice(None)] * self.n
        for c in controls:
            index[c] = 1
        sub = self.psi[tuple(index)]
        ax = t - sum(1 for c in controls if c < t)
        i0: list = [slice(None)] * sub.ndim
        i1 = list(i0)
        i0[ax], i1[ax] = 0, 1
        i0, i1 = tuple(i0), tuple(i1)
        if g.kind in _PERMUTATION:
            tmp = sub[i0].copy()
            sub[i0] = sub[i1]
            sub[i1] = tmp
            return
        if g.kind is GateKind.Z:
            sub[i1] *= -1
            return
        u = gate_matrix(g.kind, g.theta)
        a0 = sub[i0].copy()
        a1 = sub[i1].copy()
        sub[i0] = u[0, 0] * a0 + u[0, 1] * a1
        sub[i1] = u[1, 0] * a0 + u[1, 1] * a1


class SparseEngine:
    """Associative amplitude map stored as parallel (index, amplitude) arrays."""

    def __init__(self, qubit_count: int, prune: float = DEFAULT_PRUNE):
        if qubit_count > SPARSE_MAX_QUBITS:
            raise MemoryError(f"sparse engine supports at most {SPARSE_MAX_QUBITS} qubits")
        self.n = qubit_count
        self.prune = prune
        self.keys = np.zeros(0, dtype=np.int64)
        self.amps = np.zeros(0, dtype=np.complex128)
        self.peak_support = 0

    def load(self, state: QuantumState) -> None:
        self.keys = state.indices.copy()
        self.amps = state.amplitudes.copy()
        self.peak_support = max(self.peak_support, self.keys.size)

    def state(self) -> QuantumState:
        return QuantumState(self.n, self.keys, self.amps)

    def _bit(self, q: int) -> np.int64:
        return np.int64(1) << np.int64(self.n - 1 - q)

    def _control_mask(self, controls) -> np.ndarray | None:
        if not controls:
            return None
        cmask = np.int64(0)
        for c in controls:
            cmask |= self._bit(c)
        return (self.keys & cmask) == cmask

    def apply(self, g: Gate) -> None:
        keys = self.keys
        if g.kind is GateKind.SWAP:
            ba, bb = (self._bit(q) for q in g.qubits)
            differ = ((keys & ba) != 0) != ((keys & bb) != 0)
            keys[differ] ^= ba | bb
            return
        tbit = self._bit(g.target)
        sel = self._control_mask(g.controls)
        if g.kind in _PERMUTATION:
            if sel is None:
                keys ^= tbit
            else:
                keys[sel] ^= tbit
            return
        if g.kind is GateKind.Z:
            hit = (keys & tbit) != 0
            if sel is not None:
                hit &= sel
            self.amps[hit] *= -1
            return
        u = gate_matrix(g.kind, g.theta)
        if sel is None:
            sub_k, sub_a = keys, self.amps
            rest_k = rest_a = None
        else:
            sub_k, sub_a = keys[sel], self.amps[sel]
            rest_k, rest_a = keys[~sel], self.amps[~sel]
        one = (sub_k & tbit) != 0
        base, inv = np.unique(sub_k & ~tbit, return_inverse=True)
        a0 = np.zeros(base.size, dtype=np.complex128)
        a1 = np.zeros(base.size, dtype=np.complex128)
        a0[inv[~one]] = sub_a[~one]
        a1[inv[one]] = sub_a[one]
        new_k = np.concatenate([base, base | tbit])
        new_a = np.concatenate([u[0, 0] * a0 + u[0, 1] * a1, u[1, 0] * a0 + u[1, 1] * a1])
        keep = np.abs(new_a) >= self.prune
        new_k, new_a = new_k[keep], new_a[keep]
        if rest_k is not None:
            new_k = np.concatenate([rest_k, new_k])
            new_a = np.concatenate([rest_a, new_a])
        self.keys, self.amps = new_k, new_a
        self.peak_support = max(self.peak_support, new_k.size)


def make_engine(kind: str, qubit_count: int, prune: float = DEFAULT_PRUNE):
    if kind == "auto":
        kind = "dense" if qubit_count <= AUTO_DENSE_MAX_QUBITS else "sparse"
    if kind == "dense":
        return DenseEngine(qubit_count)
    if kind == "sparse":
        return SparseEngine(qubit_count, prune)
    raise ValueError(f"unknown engine {kind!r}")


def run(
    c: Circuit,
    initial: str | int | QuantumState = 0,
    engine: str = "auto",
    prune: float = DEFAULT_PRUNE,
    stats: dict | None = None,
) -> QuantumState:
    """Apply the gates of ``c`` in order to a basis state (or a given state).

    If ``stats`` is a dict it receives ``peak_support`` (largest number of
    stored amplitudes seen) and ``engine`` (the engine actually used).
    """
    if isinstance(initial, QuantumState):
        if initial.qubit_count != c.qubit_count:
            raise ValueError("initial state has the wrong qubit count")
        start = initial
    else:
        start = QuantumState.basis(c.qubit_count, initial)
    eng = make_engine(engine, c.qubit_count, prune)
    eng.load(start)
    for g in c.gates:
        eng.apply(g)
    out = eng.state()
    if stats is not None:
        stats["engine"] = type(eng).__name__
        stats["peak_support"] = max(eng.peak_support, out.indices.size)
    return out


def _register_field(state: QuantumState, reg: Register) -> np.ndarray:
    shift = state.qubit_count - reg.offset - reg.size
    return (state.indices >> np.int64(shift)) & np.int64((1 << reg.size) - 1)


def postselect(state: QuantumState, reg: Register, value: str) -> tuple[QuantumState, float]:
    """Condition on ``reg`` reading ``value``; return the renormalised state and its probability."""
    if len(value) != reg.size or set(value) - {"0", "1"}:
        raise ValueError(f"postselection value must be {reg.size} bits, got {value!r}")
    if reg.offset + reg.size > state.qubit_count:
        raise ValueError("register outside state")
    hit = _register_field(state, reg) == int(value, 2)
    amps = state.amplitudes[hit]
    prob = float(np.sum(np.abs(amps) ** 2))
    if prob <= ZERO_MASS:
        raise PostselectionError(f"{reg.name}={value} has zero probability")
    return QuantumState(state.qubit_count, state.indices[hit], amps / math.sqrt(prob)), prob


def marginal(state: QuantumState, reg: Register) -> np.ndarray:
    """Outcome probabilities of measuring only ``reg`` (length ``2**reg.size``)."""
    out = np.zeros(2**reg.size)
    np.add.at(out, _register_field(state, reg), state.probabilities())
    return out


@dataclass
class MeasurementRecord:
    shots: int
    outcomes: dict[str, int]
    seed: int
    generator: str = field(default="PCG64")

    def to_csv(self) -> str:
        lines = ["bitstring,count"] + [f"{k},{v}" for k, v in sorted(self.outcomes.items())]
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps(
            {"shots": self.shots, "seed": self.seed, "generator": self.generator,
             "outcomes": dict(sorted(self.outcomes.items()))},
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "MeasurementRecord":
        d = json.loads(text)
        return cls(d["shots"], dict(d["outcomes"]), d["seed"], d.get("generator", "PCG64"))


def sample(state: QuantumState, shots: int, seed: int, reg: Register | None = None) -> MeasurementRecord:
    """Draw ``shots`` i.i.d. outcomes from ``|amp|**2`` (optionally of one register)."""
    if shots < 1:
        raise ValueError("shots must be positive")
    if reg is None:
        labels = state.indices
        probs = state.probabilities()
        width = state.qubit_count
    else:
        probs = marginal(state, reg)
        labels = np.arange(probs.size)
        width = reg.size
    total = probs.sum()
    if total <= ZERO_MASS:
        raise PostselectionError("cannot sample from a zero state")
    rng = np.random.Generator(np.random.PCG64(seed))
    counts = rng.multinomial(shots, probs / total)
    outcomes = {_bitstring(i, width): int(c) for i, c in zip(labels, counts) if c}
    return MeasurementRecord(shots, outcomes, seed)
