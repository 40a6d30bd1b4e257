"""Rewrite circuits into a fixed basis gate set.

Decompositions are exact; a few introduce a global phase (X -> RX(pi),
Z -> RZ(pi), the T-gate Toffoli, the phase-polynomial MCX fallback), so
equivalence checks compare states up to global phase.

Multi-controlled X with k >= 3 controls borrows idle qubits of the circuit as
dirty ancillas:

* k - 2 idle qubits: Toffoli ladder.  Only the two Toffolis touching the
  target are exact; the ladder on the ancillas uses relative-phase (Margolus)
  Toffolis, whose diagonal phases cancel because the ladder is applied as
  ``L`` then ``L^-1`` around the target.
* at least one idle qubit: split the controls in two halves and recurse.
* no idle qubit: phase polynomial over all subsets (exponential; only for
  tiny standalone gates).
"""

from __future__ import annotations

import math
from itertools import combinations
from typing import Iterable, Sequence

from .circuit import Circuit, Gate, GateKind

__all__ = [
    "TRANSPILE_BASIS",
    "ELEMENTARY_BASIS",
    "UnsupportedDecompositionError",
    "transpile",
    "expand",
    "toffoli",
    "relative_phase_toffoli",
    "mcx_gates",
    "cancel_gates",
]

K = GateKind
TRANSPILE_BASIS = frozenset({K.Z, K.CNOT, K.RX, K.RZ, K.RY, K.SWAP})
# gate set used by the stage builders: the complexity table counts MCX as one gate
ELEMENTARY_BASIS = frozenset({K.X, K.Z, K.H, K.RY, K.CNOT, K.SWAP, K.MCX})

_PI = math.pi


class UnsupportedDecompositionError(ValueError):
    pass


def _g(kind, *qubits, theta=None) -> Gate:
    return Gate(kind, tuple(qubits), theta)


def cry_gates(c: int, t: int, theta: float) -> list[Gate]:
    return [_g(K.RY, t, theta=theta / 2), _g(K.CNOT, c, t), _g(K.RY, t, theta=-theta / 2), _g(K.CNOT, c, t)]


def ccry_gates(c1: int, c2: int, t: int, theta: float) -> list[Gate]:
    """Doubly-controlled RY as three controlled RYs and two CNOTs."""
    return [
        _g(K.CRY, c2, t, theta=theta / 2),
        _g(K.CNOT, c1, c2),
        _g(K.CRY, c2, t, theta=-theta / 2),
        _g(K.CNOT, c1, c2),
        _g(K.CRY, c1, t, theta=theta / 2),
    ]


def ccz_core(a: int, b: int, t: int) -> list[Gate]:
    """CCZ from 6 CNOTs and 7 RZ(+-pi/4), exact up to global phase."""
    q = _PI / 4
    return [
        _g(K.CNOT, b, t), _g(K.RZ, t, theta=-q), _g(K.CNOT, a, t), _g(K.RZ, t, theta=q),
        _g(K.CNOT, b, t), _g(K.RZ, t, theta=-q), _g(K.CNOT, a, t), _g(K.RZ, b, theta=q),
        _g(K.RZ, t, theta=q), _g(K.CNOT, a, b), _g(K.RZ, a, theta=q), _g(K.RZ, b, theta=-q),
        _g(K.CNOT, a, b),
    ]


def toffoli(a: int, b: int, t: int) -> list[Gate]:
    return [_g(K.H, t), *ccz_core(a, b, t), _g(K.H, t)]


def relative_phase_toffoli(a: int, b: int, t: int) -> list[Gate]:
    """Toffoli up to a -1 on |a=1, b=0, t=1>; self-inverse."""
    q = _PI / 4
    return [
        _g(K.RY, t, theta=q), _g(K.CNOT, b, t), _g(K.RY, t, theta=q), _g(K.CNOT, a, t),
        _g(K.RY, t, theta=-q), _g(K.CNOT, b, t), _g(K.RY, t, theta=-q),
    ]


def _mcx_ladder(controls: Sequence[int], t: int, anc: Sequence[int]) -> list[Gate]:
    k = len(controls)

    def rtof(j: int) -> list[Gate]:
        # ladder step j (2 <= j <= k-1) writes into anc[j-2]
        if j == 2:
            return relative_phase_toffoli(controls[0], controls[1], anc[0])
        return relative_phase_toffoli(controls[j - 1], anc[j - 3], anc[j - 2])

    steps = list(range(k - 1, 2, -1)) + [2] + list(range(3, k))
    ladder = [g for j in steps for g in rtof(j)]
    top = ccz_core(controls[-1], anc[k - 3], t)
    return [_g(K.H, t), *top, *ladder, *top, _g(K.H, t), *ladder]


def _mcx_phase_polynomial(controls: Sequence[int], t: int) -> list[Gate]:
    qs = [*controls, t]
    n = len(qs)
    body: list[Gate] = []
    for size in range(1, n + 1):
        phi = _PI * (-1) ** (size + 1) / 2 ** (n - 1)
        for subset in combinations(qs, size):
            tgt = subset[-1]
            fan = [_g(K.CNOT, q, tgt) for q in subset[:-1]]
            body += fan + [_g(K.RZ, tgt, theta=phi)] + fan[::-1]
    return [_g(K.H, t), *body, _g(K.H, t)]


def mcx_gates(controls: Sequence[int], t: int, idle: Iterable[int]) -> list[Gate]:
    """Expand C^k X into CNOT/Toffoli-level gates using ``idle`` qubits as dirty ancillas."""
    controls = list(controls)
    idle = [q for q in idle if q != t and q not in controls]
    k = len(controls)
    if k == 1:
        return [_g(K.CNOT, controls[0], t)]
    if k == 2:
        return toffoli(controls[0], controls[1], t)
    if len(idle) >= k - 2:
        return _mcx_ladder(controls, t, idle[: k - 2])
    if idle:
        d = idle[0]
        half = (k + 1) // 2
        c1, c2 = controls[:half], controls[half:] + [d]
        first = _g(K.MCX, *c1, d)
        second = _g(K.MCX, *c2, t)
        return [first, second, first, second]
    return _mcx_phase_polynomial(controls, t)


def _rule(g: Gate, qubit_count: int) -> list[Gate] | None:
    if g.kind is K.X:
        return [_g(K.RX, g.target, theta=_PI)]
    if g.kind is K.Z:
        return [_g(K.RZ, g.target, theta=_PI)]
    if g.kind is K.H:
        # H = RY(pi/2) Z
        return [_g(K.Z, g.target), _g(K.RY, g.target, theta=_PI / 2)]
    if g.kind is K.CRY:
        return cry_gates(*g.qubits, g.theta)
    if g.kind is K.CCRY:
        return ccry_gates(*g.qubits, g.theta)
    if g.kind is K.SWAP:
        a, b = g.qubits
        return [_g(K.CNOT, a, b), _g(K.CNOT, b, a), _g(K.CNOT, a, b)]
    if g.kind is K.MCX:
        busy = set(g.qubits)
        idle = [q for q in range(qubit_count) if q not in busy]
        return mcx_gates(g.controls, g.target, idle)
    return None


def expand(gates: Iterable[Gate], basis, qubit_count: int, expand_mcx: bool = False) -> list[Gate]:
    basis = frozenset(GateKind(k) for k in basis)
    out: list[Gate] = []

    def emit(g: Gate, depth: int = 0) -> None:
        if g.kind in basis or (g.kind is K.MCX and not expand_mcx):
            out.append(g)
            return
        sub = _rule(g, qubit_count) if depth < 64 else None
        if sub is None:
            raise UnsupportedDecompositionError(
                f"no decomposition of {g.kind} into basis {sorted(k.value for k in basis)}"
            )
        for h in sub:
            emit(h, depth + 1)

    for g in gates:
        emit(g)
    return out


_SELF_INVERSE = frozenset({K.X, K.Z, K.H, K.CNOT, K.SWAP})
_ROTATIONS = frozenset({K.RX, K.RY, K.RZ})


def _actions(g: Gate) -> dict[int, str]:
    """Per-qubit action: 'z' if diagonal there, 'x' if X-like, 'o' otherwise."""
    if g.kind in (K.Z, K.RZ):
        return {g.target: "z"}
    if g.kind in (K.X, K.RX):
        return {g.target: "x"}
    if g.kind in (K.CNOT, K.MCX):
        return {**{q: "z" for q in g.controls}, g.target: "x"}
    return {q: "o" for q in g.qubits}


def _commute(a: Gate, b: Gate) -> bool:
    """Sufficient test: on each shared qubit both gates are diagonal in the same basis."""
    aa, bb = _actions(a), _actions(b)
    return all(aa[q] == bb[q] != "o" for q in aa.keys() & bb.keys())


def _trivial(theta: float) -> bool:
    # RX/RY/RZ(2 pi k) is the identity up to global phase
    r = math.remainder(theta, 2 * _PI)
    return abs(r) < 1e-12


def cancel_gates(gates: Iterable[Gate]) -> list[Gate]:
    """Remove inverse pairs and merge rotations, looking back through commuting gates.

    A merged rotation whose angle is a multiple of 2 pi is dropped; lone
    rotations are kept whatever their angle.  Equal up to global phase to
    the input.  Repeats until nothing changes.
    """
    cur = list(gates)
    while True:
        out: list[Gate] = []
        for g in cur:
            for i in range(len(out) - 1, -1, -1):
                h = out[i]
                if h.kind is g.kind and h.qubits == g.qubits:
                    if g.kind in _SELF_INVERSE:
                        del out[i]
                        break
                    if g.kind in _ROTATIONS:
                        theta = h.theta + g.theta
                        if _trivial(theta):
                            del out[i]
                        else:
                            out[i] = Gate(g.kind, g.qubits, theta)
                        break
                if not _commute(h, g):
                    out.append(g)
                    break
            else:
                out.append(g)
        if len(out) == len(cur):
            return out
        cur = out


def transpile(c: Circuit, basis=TRANSPILE_BASIS, expand_mcx: bool = False, optimize: bool = False) -> Circuit:
    """Rewrite ``c`` so that every gate kind is in ``basis``.

    Multi-controlled X gates pass through untouched unless ``expand_mcx``.
    With ``optimize`` a cancellation pass (see ``cancel_gates``) runs after
    expansion.
    """
    gates = expand(c.gates, basis, c.qubit_count, expand_mcx)
    if optimize:
        gates = cancel_gates(gates)
    return Circuit(c.registers, tuple(gates), c.qubit_count)
