"""Stage-by-stage construction of the DQI circuit.

Layout: the error register (m qubits) comes first, then the syndrome register
(n qubits).  Unary k means ones on error qubits 0..k-1.

Stages:
    uae         sum_k w_k |1^k 0^(m-k)>
    dicke       |1^k 0^(m-k)> -> uniform superposition of weight-k strings
    phase       (-1)^(v.y)
    constraint  |y>|0> -> |y>|B^T y>
    decoder     |y>|B^T y> -> |y + g(B^T y)>|B^T y>  (GJE or lookup table)
    hadamard    H on every syndrome qubit
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .circuit import Circuit, CircuitBuilder, Gate, GateKind, Register, Stage
from .f2linalg import BitMatrix, BitVector, RrefResult, Swap, low_weight_patterns, mat_vec, rref_with_trace
from .instances import XorsatInstance
from .transpile import ELEMENTARY_BASIS, expand
from .weights import optimal_weights

__all__ = [
    "ERROR",
    "SYNDROME",
    "LookupCapError",
    "dqi_layout",
    "uae_angles",
    "build_uae",
    "build_dicke",
    "build_phase",
    "build_constraint",
    "gje_plan",
    "build_gje_decoder",
    "syndrome_table",
    "build_lookup_decoder",
    "build_hadamard",
    "PipelineConfig",
    "StageCircuits",
    "build_pipeline",
]

log = logging.getLogger(__name__)

ERROR = "error"
SYNDROME = "syndrome"
DEFAULT_LOOKUP_CAP = 4096


class LookupCapError(ValueError):
    """The syndrome table would exceed the configured entry cap."""


def dqi_layout(m: int, n: int) -> tuple[Register, Register]:
    return Register(ERROR, 0, m), Register(SYNDROME, m, n)


def _finish(b: CircuitBuilder, elementary: bool) -> Circuit:
    c = b.build()
    if not elementary:
        return c
    return Circuit(c.registers, tuple(expand(c.gates, ELEMENTARY_BASIS, c.qubit_count)), c.qubit_count)


# -- amplitude preparation ---------------------------------------------------

def uae_angles(w: Sequence[float]) -> np.ndarray:
    """theta_k = 2 atan2(||w_{>k}||, w_k); the last angle is 0 (or 2 pi if w_ell < 0)."""
    w = np.asarray(w, dtype=float)
    norm = np.linalg.norm(w)
    if w.ndim != 1 or w.size == 0 or norm == 0:
        raise ValueError("weights must be a nonzero vector")
    if abs(norm - 1.0) > 1e-9:
        raise ValueError(f"weights must have unit norm, got {norm}")
    tail = np.sqrt(np.cumsum((w**2)[::-1])[::-1])
    rest = np.append(tail[1:], 0.0)
    return 2 * np.arctan2(rest, w)


def build_uae(w: Sequence[float], m: int, elementary: bool = True) -> Circuit:
    """Unary amplitude encoding of w_0..w_ell on an m-qubit error register.

    A RY on qubit 0 followed by a chain of controlled RYs: qubit j is rotated
    only if qubit j-1 is already 1.  When ell == m the last chain link has no
    qubit to act on; its angle is 0 or 2 pi, so it is dropped, leaving a Z on
    the last qubit to carry the sign of a negative w_ell.
    """
    theta = uae_angles(w)
    w = np.asarray(w, dtype=float)
    ell = theta.size - 1
    if not 0 <= ell <= m:
        raise ValueError(f"need ell <= m, got ell={ell}, m={m}")
    b = CircuitBuilder([Register(ERROR, 0, m)])
    b.ry(0, float(theta[0]))
    for j in range(1, min(ell, m - 1) + 1):
        b.cry(j - 1, j, float(theta[j]))
    if ell == m and w[-1] < 0:
        b.z(m - 1)
    return _finish(b, elementary)


def _scs(b: CircuitBuilder, first: int, k: int, l: int) -> None:
    """Split-and-cyclic-shift on qubits first..first+k (first is the block's leading qubit)."""
    b.cnot(first + 1, first)
    b.cry(first, first + 1, 2 * math.acos(math.sqrt(1 / l)))
    b.cnot(first + 1, first)
    for j in range(2, k + 1):
        b.cnot(first + j, first)
        b.ccry(first, first + j - 1, first + j, 2 * math.acos(math.sqrt(j / l)))
        b.cnot(first + j, first)


def build_dicke(m: int, ell: int, elementary: bool = True) -> Circuit:
    """Maps unary(k) to the Dicke state D(m, k) for every k <= ell."""
    if not 0 <= ell <= m:
        raise ValueError(f"need 0 <= ell <= m, got ell={ell}, m={m}")
    b = CircuitBuilder([Register(ERROR, 0, m)])
    if ell > 0:
        for l in range(m, ell, -1):
            _scs(b, m - l, ell, l)
        for l in range(ell, 1, -1):
            _scs(b, m - l, l - 1, l)
    return _finish(b, elementary)


def build_phase(v: BitVector) -> Circuit:
    b = CircuitBuilder([Register(ERROR, 0, len(v))])
    for i, bit in enumerate(v):
        if bit:
            b.z(i)
    return b.build()


def build_constraint(B: BitMatrix) -> Circuit:
    """CNOT from error qubit i to syndrome qubit j wherever B[i, j] = 1."""
    m, n = B.rows, B.cols
    err, syn = dqi_layout(m, n)
    b = CircuitBuilder([err, syn])
    for i in range(m):
        for j in range(n):
            if B[i, j]:
                b.cnot(err[i], syn[j])
    return b.build()


def build_hadamard(n: int) -> Circuit:
    b = CircuitBuilder([Register(SYNDROME, 0, n)])
    for j in range(n):
        b.h(j)
    return b.build()


# -- decoders -----------------------------------------------------------------

def gje_plan(B: BitMatrix) -> RrefResult:
    """Row reduction of B^T (rows = syndrome qubits, columns = error qubits)."""
    return rref_with_trace(B.T)


def build_gje_decoder(B: BitMatrix, restore: bool = True) -> Circuit:
    """Reversible Gauss-Jordan decoder.

    The recorded row operations act on the syndrome register (SWAP for a row
    swap, CNOT for a row addition).  Afterwards syndrome row r holds the
    reduced syndrome bit for pivot column c, which is XORed into error qubit
    c.  With ``restore`` the row operations are undone so the syndrome
    register again holds B^T y for the final Hadamard transform.
    """
    m, n = B.rows, B.cols
    err, syn = dqi_layout(m, n)
    plan = gje_plan(B)
    ops: list[Gate] = []
    for op in plan.trace:
        if isinstance(op, Swap):
            ops.append(Gate(GateKind.SWAP, (syn[op.i], syn[op.j])))
        else:
            ops.append(Gate(GateKind.CNOT, (syn[op.src], syn[op.dst])))
    b = CircuitBuilder([err, syn]).extend(ops)
    for r, c in enumerate(plan.pivot_cols):
        b.cnot(syn[r], err[c])
    if restore:
        b.extend(g.inverse() for g in reversed(ops))
    return b.build()


def syndrome_table(B: BitMatrix, ell: int) -> dict[BitVector, BitVector]:
    """Syndrome -> error pattern for all patterns of weight <= ell.

    Patterns are visited by weight then lexicographic order; on a collision
    the first pattern wins.
    """
    table: dict[BitVector, BitVector] = {}
    Bt = B.T
    collisions = 0
    for y in low_weight_patterns(B.rows, ell):
        s = mat_vec(Bt, y)
        if s in table:
            collisions += 1
            continue
        table[s] = y
    if collisions:
        log.info("syndrome table: %d collisions, first pattern kept", collisions)
    return table


def build_lookup_decoder(B: BitMatrix, ell: int, cap: int = DEFAULT_LOOKUP_CAP) -> Circuit:
    """One multi-controlled X per set bit of each stored pattern, conditioned on its syndrome."""
    m, n = B.rows, B.cols
    size = sum(math.comb(n, k) for k in range(ell + 1))
    if size > cap:
        raise LookupCapError(f"lookup table needs up to {size} entries, cap is {cap}")
    err, syn = dqi_layout(m, n)
    b = CircuitBuilder([err, syn])
    controls = list(syn)
    for s, y in syndrome_table(B, ell).items():
        if y.weight == 0:
            continue
        flips = [syn[i] for i in range(n) if not s[i]]
        for q in flips:
            b.x(q)
        for j in range(m):
            if y[j]:
                b.mcx(controls, err[j])
        for q in flips:
            b.x(q)
    return b.build()


# -- full pipeline --------------------------------------------------------------

@dataclass(frozen=True)
class PipelineConfig:
    instance: XorsatInstance
    ell: int = 2
    decoder: str = "gje"
    lookup_cap: int = DEFAULT_LOOKUP_CAP
    weights: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.decoder not in ("gje", "lookup"):
            raise ValueError(f"unknown decoder {self.decoder!r}")
        if not 0 <= self.ell <= self.instance.m:
            raise ValueError(f"need 0 <= ell <= m, got ell={self.ell}, m={self.instance.m}")

    @property
    def m(self) -> int:
        return self.instance.m

    @property
    def n(self) -> int:
        return self.instance.n

    def resolved_weights(self) -> np.ndarray:
        if self.weights is not None:
            w = np.asarray(self.weights, dtype=float)
            if w.size != self.ell + 1:
                raise ValueError(f"expected {self.ell + 1} weights, got {w.size}")
            return w
        return optimal_weights(self.m, self.ell, self.instance.p, self.instance.r).w


@dataclass(frozen=True)
class StageCircuits:
    """Each stage on its own registers, plus the composed circuit on the shared layout."""

    layout: tuple[Register, Register]
    stages: dict[str, Circuit] = field(default_factory=dict)

    def embedded(self, name: str) -> Circuit:
        return self.stages[name].embed(self.layout)

    @property
    def order(self) -> tuple[str, ...]:
        return tuple(self.stages)

    @property
    def full(self) -> Circuit:
        c = Circuit.empty(self.layout)
        for name in self.stages:
            c = c.then(self.embedded(name))
        return c


def build_pipeline(cfg: PipelineConfig, elementary: bool = True) -> StageCircuits:
    inst = cfg.instance
    w = cfg.resolved_weights()
    decoder = (
        build_gje_decoder(inst.B)
        if cfg.decoder == "gje"
        else build_lookup_decoder(inst.B, cfg.ell, cfg.lookup_cap)
    )
    stages = {
        Stage.UAE.value: build_uae(w, cfg.m, elementary),
        Stage.DICKE.value: build_dicke(cfg.m, cfg.ell, elementary),
        Stage.PHASE.value: build_phase(inst.v),
        Stage.CONSTRAINT.value: build_constraint(inst.B),
        cfg.decoder: decoder,
        Stage.HADAMARD.value: build_hadamard(cfg.n),
    }
    return StageCircuits(dqi_layout(cfg.m, cfg.n), stages)
