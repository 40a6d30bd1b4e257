import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dqi.builder import PipelineConfig, build_dicke, build_pipeline
from dqi.circuit import Circuit, CircuitBuilder, Gate, GateKind, Register
from dqi.instances import random_invertible_instance, six_bit_instance
from dqi.oracle import definitional_oracle
from dqi.simulator import (
    DenseEngine,
    MeasurementRecord,
    PostselectionError,
    QuantumState,
    SparseEngine,
    gate_matrix,
    marginal,
    postselect,
    run,
    sample,
)

from conftest import random_state
from test_circuit import gates_on

K = GateKind


def reference_unitary(c: Circuit) -> np.ndarray:
    """Kronecker-product construction of the full unitary, one gate at a time."""
    n = c.qubit_count
    U = np.eye(2**n, dtype=complex)
    for g in c.gates:
        G = np.zeros((2**n, 2**n), dtype=complex)
        for col in range(2**n):
            bits = [(col >> (n - 1 - q)) & 1 for q in range(n)]
            if g.kind is K.SWAP:
                a, b = g.qubits
                bits[a], bits[b] = bits[b], bits[a]
                G[sum(b_ << (n - 1 - q) for q, b_ in enumerate(bits)), col] = 1
                continue
            if not all(bits[q] for q in g.controls):
                G[col, col] = 1
                continue
            u = gate_matrix(g.kind, g.theta)
            t = g.target
            for out in (0, 1):
                nb = list(bits)
                nb[t] = out
                G[sum(b_ << (n - 1 - q) for q, b_ in enumerate(nb)), col] += u[out, bits[t]]
        U = G @ U
    return U


class TestState:
    def test_basis_and_labels(self):
        s = QuantumState.basis(3, "011")
        assert s.amplitude("011") == 1 and s.amplitude(0) == 0
        assert s.to_dict() == {"011": 1 + 0j}

    def test_bad_label(self):
        with pytest.raises(ValueError):
            QuantumState.basis(3, "01")

    def test_duplicate_indices_rejected(self):
        with pytest.raises(ValueError):
            QuantumState(2, np.array([1, 1]), np.array([1, 0], dtype=complex))

    def test_dense_roundtrip(self, rng):
        s = random_state(4, rng)
        assert np.allclose(QuantumState.from_dense(s.to_dense()).to_dense(), s.to_dense())

    def test_csv_sorted(self):
        s = QuantumState.from_dict(2, {"10": 0.6, "01": 0.8})
        lines = s.to_csv().splitlines()
        assert lines[0] == "bitstring,re,im" and lines[1].startswith("01,") and lines[2].startswith("10,")

    def test_global_phase_diff(self, rng):
        s = random_state(3, rng)
        t = QuantumState(3, s.indices, s.amplitudes * np.exp(0.7j))
        assert s.max_abs_diff(t) > 0.1
        assert s.max_abs_diff(t, up_to_global_phase=True) < 1e-12


class TestRun:
    def test_empty_circuit(self):
        s = run(Circuit.empty([Register("q", 0, 3)]))
        assert s.amplitude(0) == 1 and s.support == 1

    def test_hadamard(self):
        s = run(CircuitBuilder([Register("q", 0, 1)]).h(0).build())
        assert np.allclose(s.to_dense(), [1 / math.sqrt(2)] * 2)

    def test_qubit_zero_is_most_significant(self):
        s = run(CircuitBuilder([Register("q", 0, 3)]).x(0).build())
        assert s.to_dict() == {"100": 1 + 0j}
        s = run(CircuitBuilder([Register("q", 0, 3)]).x(2).build(), engine="sparse")
        assert s.indices.tolist() == [1]

    def test_ry_matrix(self):
        s = run(CircuitBuilder([Register("q", 0, 1)]).ry(0, 0.6).build())
        assert np.allclose(s.to_dense(), [math.cos(0.3), math.sin(0.3)])

    def test_w_state(self):
        # unary(1) = |100> in this package's ordering
        s = run(build_dicke(3, 1), "100")
        expect = np.zeros(8)
        expect[[0b100, 0b010, 0b001]] = 1 / math.sqrt(3)
        assert np.allclose(s.to_dense(), expect, atol=1e-12)

    @given(st.lists(gates_on(4), max_size=20), st.integers(0, 15))
    def test_engines_match_reference_unitary(self, gates, start):
        c = Circuit((Register("q", 0, 4),), tuple(gates), 4)
        U = reference_unitary(c)
        for engine in ("dense", "sparse"):
            out = run(c, start, engine).to_dense()
            assert np.allclose(out, U[:, start], atol=1e-10)

    def test_controlled_rotations_match_reference(self, rng):
        c = (
            CircuitBuilder([Register("q", 0, 4)])
            .h(0).h(1).h(3).cry(0, 2, 0.9).ccry(3, 1, 2, -0.4).mcx([0, 1, 2], 3).ccry(2, 0, 1, 2.2)
            .build()
        )
        U = reference_unitary(c)
        s = random_state(4, rng)
        want = U @ s.to_dense()
        for engine in ("dense", "sparse"):
            assert np.allclose(run(c, s, engine).to_dense(), want, atol=1e-10)

    @given(st.lists(gates_on(5), max_size=30), st.integers(0, 31))
    def test_inverse_restores(self, gates, start):
        c = Circuit((Register("q", 0, 5),), tuple(gates), 5)
        back = run(c.inverse(), run(c, start, "sparse"), "sparse")
        assert abs(back.amplitude(start)) == pytest.approx(1.0, abs=1e-9)

    def test_norm_drift_per_gate(self, rng):
        inst = random_invertible_instance(5, rng)
        c = build_pipeline(PipelineConfig(inst, 2, "lookup")).full
        for Engine in (DenseEngine, SparseEngine):
            eng = Engine(c.qubit_count)
            eng.load(QuantumState.basis(c.qubit_count, 0))
            for g in c.gates:
                eng.apply(g)
                assert abs(eng.state().norm() - 1.0) < 1e-12

    @pytest.mark.parametrize("size", [3, 4, 5, 6])
    def test_engines_agree_on_every_stage(self, size, rng):
        inst = random_invertible_instance(size, rng)
        sc = build_pipeline(PipelineConfig(inst, min(2, size), "gje"))
        dense = sparse = QuantumState.basis(2 * size, 0)
        for name in sc.order:
            c = sc.embedded(name)
            dense, sparse = run(c, dense, "dense"), run(c, sparse, "sparse")
            assert dense.max_abs_diff(sparse) < 1e-10, name

    def test_sparse_support_after_dicke(self):
        for m, ell in [(6, 2), (8, 3), (10, 2)]:
            w = np.ones(ell + 1) / math.sqrt(ell + 1)
            from dqi.builder import build_uae

            stats = {}
            s = run(build_uae(w, m).then(build_dicke(m, ell)), engine="sparse", stats=stats)
            assert s.support <= sum(math.comb(m, k) for k in range(ell + 1))
            assert stats["engine"] == "SparseEngine"

    def test_wrong_initial_width(self):
        with pytest.raises(ValueError):
            run(Circuit.empty([Register("q", 0, 3)]), QuantumState.basis(2, 0))

    def test_unknown_engine(self):
        with pytest.raises(ValueError):
            run(Circuit.empty([Register("q", 0, 1)]), engine="gpu")


class TestPostselect:
    def test_product_state(self):
        reg_a, reg_b = Register("a", 0, 1), Register("b", 1, 1)
        s = run(CircuitBuilder([reg_a, reg_b]).h(1).build())
        post, p = postselect(s, reg_a, "0")
        assert p == pytest.approx(1.0) and post.max_abs_diff(s) < 1e-15

    def test_plus_state(self):
        s = run(CircuitBuilder([Register("q", 0, 1)]).h(0).build())
        post, p = postselect(s, Register("q", 0, 1), "0")
        assert p == pytest.approx(0.5) and post.to_dict() == {"0": pytest.approx(1.0)}

    def test_zero_mass(self):
        with pytest.raises(PostselectionError):
            postselect(QuantumState.basis(2, "00"), Register("a", 0, 1), "1")

    def test_bad_value(self):
        with pytest.raises(ValueError):
            postselect(QuantumState.basis(2, "00"), Register("a", 0, 1), "01")

    def test_six_bit_mass_matches_oracle(self):
        cfg = PipelineConfig(six_bit_instance(), 2, "gje")
        sc = build_pipeline(cfg)
        err = sc.layout[0]
        _, p_gate = postselect(run(sc.full), err, "0" * 6)
        _, p_oracle = postselect(definitional_oracle(cfg), err, "0" * 6)
        assert p_gate == pytest.approx(p_oracle, abs=1e-12)
        assert p_gate < 1.0

    def test_marginal_sums_to_one(self, rng):
        s = random_state(5, rng)
        p = marginal(s, Register("mid", 1, 3))
        assert p.shape == (8,) and p.sum() == pytest.approx(1.0)


class TestSample:
    def test_basis_state(self):
        rec = sample(QuantumState.basis(3, "101"), 500, seed=1)
        assert rec.outcomes == {"101": 500}

    def test_uniform_within_five_sigma(self):
        s = QuantumState.from_dense(np.full(4, 0.5))
        rec = sample(s, 100_000, seed=11)
        sigma = math.sqrt(100_000 * 0.25 * 0.75)
        assert sum(rec.outcomes.values()) == 100_000
        for label in ("00", "01", "10", "11"):
            assert abs(rec.outcomes[label] - 25_000) < 5 * sigma

    def test_deterministic(self, rng):
        s = random_state(4, rng)
        assert sample(s, 1000, seed=5).to_csv() == sample(s, 1000, seed=5).to_csv()
        assert sample(s, 1000, seed=5).to_csv() != sample(s, 1000, seed=6).to_csv()

    def test_register_marginal(self):
        s = QuantumState.from_dict(2, {"01": 1.0})
        rec = sample(s, 10, seed=0, reg=Register("b", 1, 1))
        assert rec.outcomes == {"1": 10}

    def test_serialization(self):
        rec = sample(QuantumState.from_dense(np.full(2, 2**-0.5)), 50, seed=3)
        back = MeasurementRecord.from_json(rec.to_json())
        assert back == rec and json.loads(rec.to_json())["generator"] == "PCG64"
        assert rec.to_csv().splitlines()[0] == "bitstring,count"

    def test_shots_positive(self):
        with pytest.raises(ValueError):
            sample(QuantumState.basis(1, 0), 0, seed=0)
