import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dqi.builder import PipelineConfig, build_pipeline
from dqi.circuit import Circuit, CircuitBuilder, Gate, GateKind, Register, count_gates
from dqi.instances import random_invertible_instance, six_bit_instance
from dqi.simulator import QuantumState, run
from dqi.transpile import (
    TRANSPILE_BASIS,
    UnsupportedDecompositionError,
    cancel_gates,
    mcx_gates,
    relative_phase_toffoli,
    toffoli,
    transpile,
)

from conftest import random_state
from test_circuit import gates_on

K = GateKind


def same_action(a: Circuit, b: Circuit, rng, trials=2) -> float:
    worst = 0.0
    for _ in range(trials):
        s = random_state(a.qubit_count, rng)
        worst = max(worst, run(a, s, "dense").max_abs_diff(run(b, s, "dense"), up_to_global_phase=True))
    return worst


def kinds(c: Circuit) -> set:
    return {g.kind for g in c.gates}


def test_already_in_basis_is_unchanged():
    c = CircuitBuilder([Register("q", 0, 3)]).cnot(0, 1).ry(2, 0.4).swap(0, 2).z(1).build()
    assert transpile(c) == c


def test_cry_rule(rng):
    c = CircuitBuilder([Register("q", 0, 2)]).cry(0, 1, 0.83).build()
    t = transpile(c)
    assert count_gates(t).counts == {"RY": 2, "CNOT": 2}
    assert same_action(c, t, rng) < 1e-10


def test_ccry_expands_to_three_cry_two_cnot():
    # the Dicke three-qubit block: outer CNOT pair around one CCRY
    c = CircuitBuilder([Register("q", 0, 3)]).cnot(2, 0).ccry(0, 1, 2, 1.1).cnot(2, 0).build()
    t = transpile(c, {K.CNOT, K.CRY, K.RY})
    assert count_gates(t).counts == {"CNOT": 4, "CRY": 3}
    full = count_gates(transpile(c, {K.CNOT, K.RY})).counts
    assert full == {"CNOT": 10, "RY": 6}


def test_all_kinds_equivalent(rng):
    c = (
        CircuitBuilder([Register("q", 0, 4)])
        .x(0).h(1).z(2).cry(0, 2, 0.7).ccry(0, 1, 3, -1.9).swap(0, 3).mcx([0, 1, 2], 3)
        .build()
    )
    t = transpile(c, expand_mcx=True)
    assert kinds(t) <= TRANSPILE_BASIS
    assert same_action(c, t, rng) < 1e-10


def test_mcx_kept_unless_requested():
    c = CircuitBuilder([Register("q", 0, 4)]).mcx([0, 1, 2], 3).build()
    assert transpile(c).gates == c.gates
    assert GateKind.MCX not in kinds(transpile(c, expand_mcx=True))


def test_unsupported_rule():
    c = CircuitBuilder([Register("q", 0, 2)]).cry(0, 1, 0.3).build()
    with pytest.raises(UnsupportedDecompositionError):
        transpile(c, {K.RY, K.SWAP})
    with pytest.raises(UnsupportedDecompositionError):
        transpile(CircuitBuilder([Register("q", 0, 1)]).h(0).build(), {K.Z, K.RX})


@pytest.mark.parametrize(
    "n, controls, target",
    [
        (3, [0, 1], 2),
        (4, [0, 1, 2], 3),  # one idle qubit short of the ladder: split
        (4, [3, 1, 0], 2),
        (5, [0, 1, 2, 3], 4),  # no idle qubit: phase polynomial
        (6, [0, 1, 2], 5),
        (7, [0, 1, 2, 3, 4], 6),
        (8, [1, 3, 5, 7], 0),
        (10, [0, 2, 4, 6, 8], 9),
        (10, [0, 1, 2, 3, 4, 5, 6, 7], 9),
    ],
)
def test_mcx_expansion_exact(n, controls, target, rng):
    c = CircuitBuilder([Register("q", 0, n)]).mcx(controls, target).build()
    t = transpile(c, expand_mcx=True)
    assert kinds(t) <= TRANSPILE_BASIS
    assert same_action(c, t, rng, trials=1) < 1e-10


def test_ladder_cost_is_linear():
    # 2 CCZ cores plus two relative-phase ladders of 2k-5 Toffolis each
    for k in (3, 5, 8):
        gates = mcx_gates(list(range(k)), k, range(k + 1, 2 * k))
        n_cnot = sum(g.kind is K.CNOT for g in gates)
        assert n_cnot == 12 + 6 * (2 * k - 5)


def test_relative_phase_toffoli():
    reg = [Register("q", 0, 3)]
    rel = run(Circuit(tuple(reg), tuple(relative_phase_toffoli(0, 1, 2)), 3), 0, "dense")
    exact = Circuit(tuple(reg), tuple(toffoli(0, 1, 2)), 3)
    for label in range(8):
        a = run(Circuit(tuple(reg), tuple(relative_phase_toffoli(0, 1, 2)), 3), label, "dense")
        b = run(exact, label, "dense")
        # same basis state, amplitude differs by a phase only
        assert np.allclose(np.abs(a.to_dense()), np.abs(b.to_dense()), atol=1e-12)
    twice = Circuit(tuple(reg), tuple(relative_phase_toffoli(0, 1, 2) * 2), 3)
    assert abs(run(twice, 5, "dense").amplitude(5)) == pytest.approx(1.0)
    assert rel.amplitude(0) == pytest.approx(1.0)


class TestCancellation:
    def test_pair_through_commuting_gate(self):
        gates = [Gate(K.CNOT, (0, 1)), Gate(K.CNOT, (0, 2)), Gate(K.CNOT, (0, 1))]
        assert cancel_gates(gates) == [Gate(K.CNOT, (0, 2))]

    def test_blocked_by_noncommuting_gate(self):
        gates = [Gate(K.CNOT, (0, 1)), Gate(K.CNOT, (1, 2)), Gate(K.CNOT, (0, 1))]
        assert cancel_gates(gates) == gates

    def test_rotation_merge(self):
        gates = [Gate(K.RZ, (0,), 0.3), Gate(K.CNOT, (0, 1)), Gate(K.RZ, (0,), 0.4)]
        out = cancel_gates(gates)
        assert len(out) == 2 and out[0].theta == pytest.approx(0.7)

    def test_lone_zero_rotation_kept(self):
        gates = [Gate(K.RY, (0,), 0.0)]
        assert cancel_gates(gates) == gates

    @given(st.lists(gates_on(4), max_size=25), st.integers(0, 2**32 - 1))
    def test_equivalent(self, gates, seed):
        rng = np.random.default_rng(seed)
        reg = (Register("q", 0, 4),)
        a = Circuit(reg, tuple(gates), 4)
        b = Circuit(reg, tuple(cancel_gates(gates)), 4)
        assert len(b) <= len(a)
        assert same_action(a, b, rng, trials=1) < 1e-10


@pytest.mark.parametrize("decoder", ["gje", "lookup"])
@pytest.mark.parametrize("optimize", [False, True])
def test_builder_outputs_transpile_exactly(decoder, optimize, rng):
    for inst in (random_invertible_instance(4, rng), random_invertible_instance(5, rng)):
        sc = build_pipeline(PipelineConfig(inst, 2, decoder))
        for name in sc.order:
            c = sc.embedded(name)
            t = transpile(c, expand_mcx=True, optimize=optimize)
            assert kinds(t) <= TRANSPILE_BASIS
            assert same_action(c, t, rng, trials=1) < 1e-10, name


def test_six_bit_full_pipeline_transpiles(rng):
    sc = build_pipeline(PipelineConfig(six_bit_instance(), 2, "gje"))
    t = transpile(sc.full, expand_mcx=True, optimize=True)
    a, b = run(sc.full), run(t)
    assert a.max_abs_diff(b, up_to_global_phase=True) < 1e-10
