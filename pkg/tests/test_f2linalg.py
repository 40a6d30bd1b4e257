import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dqi.f2linalg import (
    AddRow,
    BitMatrix,
    BitVector,
    Swap,
    brute_force_decode,
    is_rref,
    low_weight_patterns,
    mat_vec,
    rank,
    replay,
    rref_with_trace,
)
from dqi.instances import six_bit_instance

from conftest import bit_matrices


def reference_rank(M: BitMatrix) -> int:
    # textbook elimination on a numpy copy, independent of the traced version
    a = M.to_numpy().astype(np.uint8) % 2
    r = 0
    for c in range(a.shape[1]):
        hits = np.flatnonzero(a[r:, c]) + r
        if hits.size == 0:
            continue
        a[[r, hits[0]]] = a[[hits[0], r]]
        for k in range(a.shape[0]):
            if k != r and a[k, c]:
                a[k] ^= a[r]
        r += 1
        if r == a.shape[0]:
            break
    return r


class TestBitTypes:
    def test_vector_rejects_non_bits(self):
        with pytest.raises(ValueError):
            BitVector((0, 2))

    def test_vector_rejects_empty(self):
        with pytest.raises(ValueError):
            BitVector(())

    def test_mask_roundtrip(self):
        v = BitVector.from_string("10110")
        assert BitVector.from_mask(v.mask, 5) == v
        assert v.weight == 3
        assert str(v) == "10110"

    def test_dot_and_xor(self):
        a, b = BitVector.from_string("1101"), BitVector.from_string("1011")
        assert a.dot(b) == 0
        assert str(a ^ b) == "0110"

    def test_matrix_ragged_rows_rejected(self):
        with pytest.raises(ValueError):
            BitMatrix.from_rows([[1, 0], [1]])

    def test_indexing_and_columns(self):
        M = BitMatrix.from_rows([[1, 0, 1], [0, 1, 1]])
        assert M[0, 2] == 1 and M[1, 0] == 0
        assert M.column(2).bits == (1, 1)
        assert M.nnz() == 4

    @given(bit_matrices())
    def test_transpose_involution(self, M):
        assert M.T.T == M
        assert M.T.to_list() == [list(c) for c in zip(*M.to_list())]

    @given(bit_matrices())
    def test_text_roundtrip(self, M):
        assert BitMatrix.from_text(M.to_text()) == M

    def test_text_errors_carry_line_numbers(self):
        with pytest.raises(ValueError, match="line 3"):
            BitMatrix.from_text("2 2\n1 0\n1 2\n")
        with pytest.raises(ValueError, match="line 1"):
            BitMatrix.from_text("two 2\n")

    def test_matmul_matches_numpy(self, rng):
        A, B = BitMatrix.random(4, 5, rng), BitMatrix.random(5, 3, rng)
        assert (A @ B).to_list() == ((A.to_numpy().astype(int) @ B.to_numpy().astype(int)) % 2).tolist()

    def test_row_ops_reject_equal_indices(self):
        with pytest.raises(ValueError):
            Swap(1, 1)
        with pytest.raises(ValueError):
            AddRow(2, 2)


class TestRref:
    def test_identity_is_already_reduced(self):
        res = rref_with_trace(BitMatrix.identity(3))
        assert res.trace == () and res.rank == 3

    def test_antidiagonal_needs_one_swap(self):
        res = rref_with_trace(BitMatrix.from_rows([[0, 1], [1, 0]]))
        assert res.trace == (Swap(0, 1),) and res.rank == 2

    def test_zero_column_skipped(self):
        res = rref_with_trace(BitMatrix.from_rows([[0, 1, 1], [0, 1, 0]]))
        assert res.pivot_cols == (1, 2)
        assert res.reduced.to_list() == [[0, 1, 0], [0, 0, 1]]

    def test_eliminations_in_ascending_row_order(self):
        res = rref_with_trace(BitMatrix.from_rows([[1, 0], [1, 1], [1, 0]]))
        assert res.trace[:2] == (AddRow(0, 1), AddRow(0, 2))

    def test_six_bit_transpose(self):
        Bt = six_bit_instance().B.T
        res = rref_with_trace(Bt)
        # vertex 2 is isolated and the other five are connected: rank 5 - 1
        assert res.rank == reference_rank(Bt) == 4
        assert replay(res.trace, Bt) == res.reduced
        assert rref_with_trace(res.reduced).trace == ()

    def test_replay_rejects_bad_rows(self):
        with pytest.raises(IndexError):
            replay([AddRow(0, 5)], BitMatrix.identity(2))

    def test_empty_matrix_rejected(self):
        with pytest.raises(ValueError):
            rref_with_trace(BitMatrix.zeros(0, 3))

    @given(bit_matrices(max_rows=10, max_cols=10))
    def test_replay_soundness(self, M):
        res = rref_with_trace(M)
        assert replay(res.trace, M) == res.reduced
        assert is_rref(res.reduced)
        assert res.rank == len(res.pivot_cols) <= min(M.rows, M.cols)

    @given(bit_matrices(max_rows=10, max_cols=10))
    def test_reverse_trace_restores(self, M):
        trace = rref_with_trace(M).trace
        assert replay(tuple(reversed(trace)), replay(trace, M)) == M

    @given(bit_matrices(max_rows=16, max_cols=16))
    def test_rank_transpose_invariant(self, M):
        assert rank(M) == rank(M.T) == reference_rank(M)

    def test_is_rref_rejects(self):
        assert not is_rref(BitMatrix.from_rows([[0, 1], [1, 0]]))
        assert not is_rref(BitMatrix.from_rows([[1, 1], [0, 1]]))
        assert not is_rref(BitMatrix.from_rows([[0, 0], [1, 0]]))


class TestMatVec:
    @given(st.integers(1, 8).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, 2**n - 1))))
    def test_identity(self, nx):
        n, mask = nx
        x = BitVector.from_mask(mask, n)
        assert mat_vec(BitMatrix.identity(n), x) == x

    def test_xor_cancellation(self):
        assert mat_vec(BitMatrix.from_rows([[1, 1]]), BitVector((1, 1))).bits == (0,)

    def test_unit_vector_picks_column(self):
        Bt = six_bit_instance().B.T
        assert mat_vec(Bt, BitVector.unit(6, 1)) == Bt.column(1)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            mat_vec(BitMatrix.identity(3), BitVector((1, 0)))


class TestDecode:
    def test_low_weight_pattern_order(self):
        pats = [str(p) for p in low_weight_patterns(3, 2)]
        assert pats == ["000", "001", "010", "100", "011", "101", "110"]

    def test_zero_syndrome(self, rng):
        H = BitMatrix.random(4, 6, rng)
        assert brute_force_decode(H, BitVector.zeros(4), 2) == BitVector.zeros(6)

    def test_identity(self):
        s = BitVector.from_string("0101")
        assert brute_force_decode(BitMatrix.identity(4), s, 2) == s

    def test_out_of_budget(self):
        assert brute_force_decode(BitMatrix.identity(4), BitVector.ones(4), 2) is None

    def test_invertible_exhaustive(self, rng):
        H = BitMatrix.random_invertible(6, rng)
        count = 0
        for y in low_weight_patterns(6, 2):
            assert brute_force_decode(H, mat_vec(H, y), 2) == y
            count += 1
        assert count == 22

    def test_tie_break_lexicographic(self):
        # columns 0 and 1 are equal, so e_0 and e_1 share a syndrome
        H = BitMatrix.from_rows([[1, 1, 0], [0, 0, 1]])
        assert str(brute_force_decode(H, BitVector((1, 0)), 1)) == "010"

    @given(bit_matrices(max_rows=6, max_cols=7), st.data())
    def test_weight_never_exceeds_input(self, H, data):
        y = BitVector(tuple(data.draw(st.lists(st.integers(0, 1), min_size=H.cols, max_size=H.cols))))
        w = data.draw(st.integers(y.weight, H.cols))
        found = brute_force_decode(H, mat_vec(H, y), w)
        assert found is not None and found.weight <= y.weight
        assert mat_vec(H, found) == mat_vec(H, y)

    def test_patterns_match_itertools_count(self):
        for n, w in itertools.product(range(1, 7), range(0, 4)):
            expected = sum(len(list(itertools.combinations(range(n), k))) for k in range(min(w, n) + 1))
            assert len(list(low_weight_patterns(n, w))) == expected
