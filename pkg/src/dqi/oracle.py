"""Closed-form DQI states computed without any gates.

Every stage state is a sum over error patterns y with |y| <= ell:

    alpha_y = w_|y| / sqrt(C(m, |y|)) * (-1)^(v.y)

paired with the register contents that stage should leave behind.  These
serve as the reference for gate-level simulation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .builder import PipelineConfig, gje_plan, syndrome_table
from .circuit import Stage
from .f2linalg import BitMatrix, BitVector, low_weight_patterns, mat_vec, replay
from .instances import XorsatInstance
from .simulator import QuantumState

__all__ = ["Term", "terms", "decoder_map", "stage_states", "definitional_oracle", "ideal_distribution"]


@dataclass(frozen=True)
class Term:
    y: BitVector
    alpha: float
    syndrome: BitVector
    residual: BitVector


def _index(bits: BitVector) -> int:
    # qubit 0 of a register is its most significant bit
    return int(str(bits), 2) if len(bits) else 0


def decoder_map(inst: XorsatInstance, decoder: str, ell: int) -> Callable[[BitVector], BitVector]:
    """Classical action g(s) of the decoder: the pattern XORed into the error register."""
    m, n = inst.m, inst.n
    if decoder == "lookup":
        table = syndrome_table(inst.B, ell)
        zero = BitVector.zeros(m)
        return lambda s: table.get(s, zero)
    if decoder != "gje":
        raise ValueError(f"unknown decoder {decoder!r}")
    plan = gje_plan(inst.B)
    E = replay(plan.trace, BitMatrix.identity(n))

    def g(s: BitVector) -> BitVector:
        reduced = mat_vec(E, s)
        out = [0] * m
        for r, c in enumerate(plan.pivot_cols):
            out[c] = reduced[r]
        return BitVector(tuple(out))

    return g


def _weights(cfg: PipelineConfig, w) -> np.ndarray:
    if w is None:
        return cfg.resolved_weights()
    w = np.asarray(getattr(w, "w", w), dtype=float)
    if w.size != cfg.ell + 1:
        raise ValueError(f"expected {cfg.ell + 1} weights, got {w.size}")
    return w


def terms(cfg: PipelineConfig, w=None) -> list[Term]:
    inst = cfg.instance
    w = _weights(cfg, w)
    g = decoder_map(inst, cfg.decoder, cfg.ell)
    Bt = inst.B.T
    out = []
    for y in low_weight_patterns(inst.m, cfg.ell):
        k = y.weight
        sign = -1.0 if y.dot(inst.v) else 1.0
        s = mat_vec(Bt, y)
        out.append(Term(y, sign * w[k] / math.sqrt(math.comb(inst.m, k)), s, y ^ g(s)))
    return out


def _from_pairs(n_qubits: int, pairs: dict[int, complex]) -> QuantumState:
    return QuantumState.from_dict(n_qubits, pairs)


def definitional_oracle(cfg: PipelineConfig, w=None) -> QuantumState:
    """Final state sum_y alpha_y |residual(y)> H^n |B^T y>.

    ``w`` (array or WeightVector) overrides the configured weights.
    """
    m, n = cfg.m, cfg.n
    xs = np.arange(2**n, dtype=np.int64)
    blocks: dict[int, np.ndarray] = {}
    for t in terms(cfg, w):
        parity = (np.bitwise_count(xs & _index(t.syndrome)) & 1).astype(np.int64)
        e = _index(t.residual)
        blocks.setdefault(e, np.zeros(2**n))
        blocks[e] += t.alpha * (1.0 - 2.0 * parity)
    scale = 2.0 ** (-n / 2)
    idx, amp = [], []
    for e, vec in sorted(blocks.items()):
        keep = np.flatnonzero(np.abs(vec) > 1e-13)
        idx.append((e << n) | xs[keep])
        amp.append(vec[keep] * scale)
    if not idx:
        return QuantumState(m + n, np.zeros(0, dtype=np.int64), np.zeros(0, dtype=complex))
    return QuantumState(m + n, np.concatenate(idx), np.concatenate(amp).astype(complex))


def stage_states(cfg: PipelineConfig, w=None) -> dict[str, QuantumState]:
    """Expected state after each stage, on the full error+syndrome layout."""
    m, n = cfg.m, cfg.n
    w = _weights(cfg, w)
    ts = terms(cfg, w)
    acc: dict[str, dict[int, complex]] = {s: {} for s in ("uae", "dicke", "phase", "constraint", cfg.decoder)}

    def add(stage: str, e: BitVector, s: BitVector | None, a: float) -> None:
        key = (_index(e) << n) | (_index(s) if s is not None else 0)
        acc[stage][key] = acc[stage].get(key, 0) + a

    for k, wk in enumerate(w):
        add("uae", BitVector(tuple([1] * k + [0] * (m - k))), None, wk)
    for t in ts:
        k = t.y.weight
        plain = w[k] / math.sqrt(math.comb(m, k))
        add("dicke", t.y, None, plain)
        add("phase", t.y, None, t.alpha)
        add("constraint", t.y, t.syndrome, t.alpha)
        add(cfg.decoder, t.residual, t.syndrome, t.alpha)
    out = {name: _from_pairs(m + n, amps) for name, amps in acc.items()}
    out[Stage.HADAMARD.value] = definitional_oracle(cfg, w)
    return out


def ideal_distribution(cfg: PipelineConfig, w=None) -> np.ndarray:
    """P(x | error register = 0) for the ideal (gate-free) final state."""
    n = cfg.n
    state = definitional_oracle(cfg, w)
    probs = np.zeros(2**n)
    sel = (state.indices >> n) == 0
    np.add.at(probs, state.indices[sel] & (2**n - 1), np.abs(state.amplitudes[sel]) ** 2)
    total = probs.sum()
    if total == 0:
        raise ValueError("error register is never zero")
    return probs / total
