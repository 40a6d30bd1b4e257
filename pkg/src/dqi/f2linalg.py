"""Dense GF(2) matrices and vectors with packed rows.

Each matrix row is stored as a Python int where column ``j`` lives at bit
``1 << j``.  The public contract is only the {0, 1} entry semantics; the
packing is an implementation detail.

Row reduction records every row operation so that the elimination can be
replayed, inverted, or compiled into SWAP/CNOT gates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Iterator, Sequence, Union

import numpy as np

__all__ = [
    "BitVector",
    "BitMatrix",
    "Swap",
    "AddRow",
    "RowOp",
    "RrefResult",
    "rref_with_trace",
    "replay",
    "rank",
    "is_rref",
    "mat_vec",
    "brute_force_decode",
    "low_weight_patterns",
]


def _check_bit(b) -> int:
    b = int(b)
    if b not in (0, 1):
        raise ValueError(f"entries must be 0 or 1, got {b}")
    return b


@dataclass(frozen=True)
class BitVector:
    """Immutable vector over GF(2)."""

    bits: tuple[int, ...]

    def __post_init__(self):
        bits = tuple(_check_bit(b) for b in self.bits)
        if not bits:
            raise ValueError("BitVector needs at least one entry")
        object.__setattr__(self, "bits", bits)

    @classmethod
    def zeros(cls, length: int) -> "BitVector":
        return cls((0,) * length)

    @classmethod
    def ones(cls, length: int) -> "BitVector":
        return cls((1,) * length)

    @classmethod
    def unit(cls, length: int, index: int) -> "BitVector":
        bits = [0] * length
        bits[index] = 1
        return cls(tuple(bits))

    @classmethod
    def from_mask(cls, mask: int, length: int) -> "BitVector":
        """Inverse of :attr:`mask` (entry ``j`` is bit ``1 << j``)."""
        return cls(tuple((mask >> j) & 1 for j in range(length)))

    @classmethod
    def from_string(cls, text: str) -> "BitVector":
        return cls(tuple(int(c) for c in text.strip()))

    @property
    def mask(self) -> int:
        return sum(1 << j for j, b in enumerate(self.bits) if b)

    @property
    def weight(self) -> int:
        return sum(self.bits)

    def __len__(self) -> int:
        return len(self.bits)

    def __getitem__(self, j: int) -> int:
        return self.bits[j]

    def __iter__(self) -> Iterator[int]:
        return iter(self.bits)

    def __xor__(self, other: "BitVector") -> "BitVector":
        if len(other) != len(self):
            raise ValueError("length mismatch")
        return BitVector(tuple(a ^ b for a, b in zip(self.bits, other.bits)))

    def dot(self, other: "BitVector") -> int:
        if len(other) != len(self):
            raise ValueError("length mismatch")
        return bin(self.mask & other.mask).count("1") & 1

    def __str__(self) -> str:
        return "".join(map(str, self.bits))


@dataclass(frozen=True)
class BitMatrix:
    """Immutable dense matrix over GF(2) with packed rows."""

    rows: int
    cols: int
    data: tuple[int, ...] = field(repr=False)

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("negative dimension")
        if len(self.data) != self.rows:
            raise ValueError(f"expected {self.rows} packed rows, got {len(self.data)}")
        limit = 1 << self.cols
        for r in self.data:
            if not 0 <= r < limit:
                raise ValueError("packed row has bits outside the column range")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "BitMatrix":
        rows = [list(r) for r in rows]
        if not rows:
            raise ValueError("matrix needs at least one row")
        ncols = len(rows[0])
        packed = []
        for i, r in enumerate(rows):
            if len(r) != ncols:
                raise ValueError(f"row {i} has {len(r)} entries, expected {ncols}")
            packed.append(sum(_check_bit(b) << j for j, b in enumerate(r)))
        return cls(len(rows), ncols, tuple(packed))

    @classmethod
    def from_numpy(cls, arr) -> "BitMatrix":
        arr = np.asarray(arr)
        if arr.ndim != 2:
            raise ValueError("expected a 2-D array")
        return cls.from_rows(arr.astype(int).tolist())

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(rows, cols, (0,) * rows)

    @classmethod
    def identity(cls, size: int) -> "BitMatrix":
        return cls(size, size, tuple(1 << i for i in range(size)))

    @classmethod
    def random(cls, rows: int, cols: int, rng: np.random.Generator) -> "BitMatrix":
        return cls.from_numpy(rng.integers(0, 2, size=(rows, cols)))

    @classmethod
    def random_invertible(cls, size: int, rng: np.random.Generator) -> "BitMatrix":
        while True:
            m = cls.random(size, size, rng)
            if rank(m) == size:
                return m

    def __getitem__(self, idx: tuple[int, int]) -> int:
        i, j = idx
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(idx)
        return (self.data[i] >> j) & 1

    def row(self, i: int) -> BitVector:
        return BitVector.from_mask(self.data[i], self.cols)

    def column(self, j: int) -> BitVector:
        return BitVector(tuple((r >> j) & 1 for r in self.data))

    def transpose(self) -> "BitMatrix":
        packed = []
        for j in range(self.cols):
            packed.append(sum(((r >> j) & 1) << i for i, r in enumerate(self.data)))
        return BitMatrix(self.cols, self.rows, tuple(packed))

    @property
    def T(self) -> "BitMatrix":
        return self.transpose()

    def to_list(self) -> list[list[int]]:
        return [[(r >> j) & 1 for j in range(self.cols)] for r in self.data]

    def to_numpy(self) -> np.ndarray:
        return np.array(self.to_list(), dtype=np.uint8).reshape(self.rows, self.cols)

    def nnz(self) -> int:
        return sum(bin(r).count("1") for r in self.data)

    def __matmul__(self, other: "BitMatrix") -> "BitMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        packed = []
        for r in self.data:
            acc = 0
            for k in range(self.cols):
                if (r >> k) & 1:
                    acc ^= other.data[k]
            packed.append(acc)
        return BitMatrix(self.rows, other.cols, tuple(packed))

    # text fixture format: "rows cols" header, then one line of 0/1 per row
    def to_text(self) -> str:
        lines = [f"{self.rows} {self.cols}"]
        lines += [" ".join(map(str, r)) for r in self.to_list()]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "BitMatrix":
        lines = [(n, ln.strip()) for n, ln in enumerate(text.splitlines(), 1)]
        lines = [(n, ln) for n, ln in lines if ln and not ln.startswith("#")]
        if not lines:
            raise ValueError("line 1: empty matrix text")
        n0, header = lines[0]
        try:
            nrows, ncols = (int(t) for t in header.split())
        except ValueError:
            raise ValueError(f"line {n0}: expected 'rows cols', got {header!r}") from None
        body = lines[1:]
        if len(body) != nrows:
            raise ValueError(f"line {n0}: header promises {nrows} rows, found {len(body)}")
        rows = []
        for n, ln in body:
            toks = ln.split()
            if len(toks) != ncols or any(t not in ("0", "1") for t in toks):
                raise ValueError(f"line {n}: expected {ncols} entries of 0/1, got {ln!r}")
            rows.append([int(t) for t in toks])
        return cls.from_rows(rows)


@dataclass(frozen=True)
class Swap:
    i: int
    j: int

    def __post_init__(self):
        if self.i == self.j:
            raise ValueError("Swap needs two distinct rows")


@dataclass(frozen=True)
class AddRow:
    """``row[dst] ^= row[src]``."""

    src: int
    dst: int

    def __post_init__(self):
        if self.src == self.dst:
            raise ValueError("AddRow needs two distinct rows")


RowOp = Union[Swap, AddRow]


@dataclass(frozen=True)
class RrefResult:
    reduced: BitMatrix
    trace: tuple[RowOp, ...]
    rank: int
    pivot_cols: tuple[int, ...]

    @property
    def pivot_rows(self) -> dict[int, int]:
        """Map pivot column -> row holding its leading one."""
        return {c: r for r, c in enumerate(self.pivot_cols)}


def _apply(rows: list[int], op: RowOp) -> None:
    if isinstance(op, Swap):
        rows[op.i], rows[op.j] = rows[op.j], rows[op.i]
    else:
        rows[op.dst] ^= rows[op.src]


def replay(trace: Iterable[RowOp], m: BitMatrix) -> BitMatrix:
    rows = list(m.data)
    for op in trace:
        for r in (op.i, op.j) if isinstance(op, Swap) else (op.src, op.dst):
            if not 0 <= r < m.rows:
                raise IndexError(f"{op} references row outside 0..{m.rows - 1}")
        _apply(rows, op)
    return BitMatrix(m.rows, m.cols, tuple(rows))


def rref_with_trace(m: BitMatrix) -> RrefResult:
    """Gauss-Jordan elimination over GF(2), recording each row operation.

    Columns are processed left to right.  The pivot is the first row at or
    below the current pivot row with a one in the column; columns without
    such a row are skipped.  Eliminations for a column are emitted in
    ascending target-row order and clear both above and below the pivot.
    """
    if m.rows == 0 or m.cols == 0:
        raise ValueError("matrix must be nonempty")
    rows = list(m.data)
    trace: list[RowOp] = []
    pivots: list[int] = []
    r = 0
    for c in range(m.cols):
        if r == m.rows:
            break
        bit = 1 << c
        found = next((i for i in range(r, m.rows) if rows[i] & bit), None)
        if found is None:
            continue
        if found != r:
            op = Swap(r, found)
            _apply(rows, op)
            trace.append(op)
        for k in range(m.rows):
            if k != r and rows[k] & bit:
                op = AddRow(r, k)
                _apply(rows, op)
                trace.append(op)
        pivots.append(c)
        r += 1
    return RrefResult(BitMatrix(m.rows, m.cols, tuple(rows)), tuple(trace), len(pivots), tuple(pivots))


def rank(m: BitMatrix) -> int:
    return rref_with_trace(m).rank


def is_rref(m: BitMatrix) -> bool:
    last_lead = -1
    seen_zero = False
    leads = []
    for r in m.data:
        if r == 0:
            seen_zero = True
            continue
        if seen_zero:
            return False
        lead = (r & -r).bit_length() - 1
        if lead <= last_lead:
            return False
        last_lead = lead
        leads.append(lead)
    for lead in leads:
        if sum((r >> lead) & 1 for r in m.data) != 1:
            return False
    return True


def mat_vec(m: BitMatrix, x: BitVector) -> BitVector:
    if m.cols != len(x):
        raise ValueError(f"dimension mismatch: matrix has {m.cols} columns, vector has {len(x)} entries")
    xm = x.mask
    return BitVector(tuple(bin(r & xm).count("1") & 1 for r in m.data))


def low_weight_patterns(length: int, max_weight: int) -> Iterator[BitVector]:
    """All vectors of weight <= max_weight, by weight then lexicographic order.

    Lexicographic compares the bit tuples, so within a weight class the
    vectors with their ones furthest to the right come first.
    """
    for w in range(min(max_weight, length) + 1):
        for combo in combinations(range(length), w):
            bits = [0] * length
            for j in combo:
                bits[length - 1 - j] = 1
            yield BitVector(tuple(bits))


def brute_force_decode(h: BitMatrix, s: BitVector, max_weight: int) -> BitVector | None:
    """Minimum-weight ``y`` with ``h @ y == s`` and weight <= max_weight.

    Ties go to the lexicographically smallest ``y``.  Returns None when no
    pattern within the weight budget matches.
    """
    if h.rows != len(s):
        raise ValueError(f"syndrome length {len(s)} does not match {h.rows} rows")
    # columns as packed ints: syndrome of y is XOR of selected columns
    col_masks = [h.column(j).mask for j in range(h.cols)]
    target = s.mask
    for y in low_weight_patterns(h.cols, max_weight):
        acc = 0
        for j, b in enumerate(y.bits):
            if b:
                acc ^= col_masks[j]
        if acc == target:
            return y
    return None
