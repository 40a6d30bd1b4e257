"""Max-XORSAT / MaxCut instances and their classical ground truth."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .f2linalg import BitMatrix, BitVector

__all__ = [
    "InstanceFormatError",
    "XorsatInstance",
    "MaxCutGraph",
    "ObjectiveTable",
    "maxcut_to_xorsat",
    "objective",
    "objective_values",
    "brute_force_optimum",
    "expected_satisfied_fraction",
    "random_maxcut",
    "cycle_maxcut",
    "random_invertible_instance",
    "six_bit_instance",
]

MAX_BRUTE_FORCE_VARS = 24


class InstanceFormatError(ValueError):
    """Malformed instance or graph input; message carries the line number when known."""


@dataclass(frozen=True)
class XorsatInstance:
    """Maximise the number of satisfied equations ``b_i . x = v_i`` over F_2."""

    B: BitMatrix
    v: BitVector
    p: int = 2
    r: int = 1

    def __post_init__(self):
        if (self.p, self.r) != (2, 1):
            raise ValueError("only p=2, r=1 (Max-XORSAT) is supported")
        if len(self.v) != self.B.rows:
            raise ValueError(f"v has length {len(self.v)}, B has {self.B.rows} rows")
        for i, row in enumerate(self.B.data):
            if row == 0:
                raise ValueError(f"row {i} of B is all zero")

    @property
    def m(self) -> int:
        return self.B.rows

    @property
    def n(self) -> int:
        return self.B.cols

    def to_dict(self) -> dict:
        return {"m": self.m, "n": self.n, "B": self.B.to_list(), "v": list(self.v.bits)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "XorsatInstance":
        try:
            m, n, rows, v = int(d["m"]), int(d["n"]), d["B"], d["v"]
        except (KeyError, TypeError, ValueError) as exc:
            raise InstanceFormatError(f"instance JSON needs integer m, n and arrays B, v ({exc})") from None
        if len(rows) != m or any(len(r) != n for r in rows):
            raise InstanceFormatError(f"B must be {m}x{n}")
        if len(v) != m:
            raise InstanceFormatError(f"v must have length {m}")
        try:
            return cls(BitMatrix.from_rows(rows), BitVector(tuple(v)))
        except ValueError as exc:
            raise InstanceFormatError(str(exc)) from None

    @classmethod
    def from_json(cls, text: str) -> "XorsatInstance":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InstanceFormatError(f"line {exc.lineno}: {exc.msg}") from None
        return cls.from_dict(d)


@dataclass(frozen=True)
class MaxCutGraph:
    n_vertices: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        edges = tuple((int(u), int(w)) for u, w in self.edges)
        seen = set()
        for u, w in edges:
            if not 0 <= u < w < self.n_vertices:
                raise ValueError(f"edge ({u}, {w}) must satisfy 0 <= u < w < {self.n_vertices}")
            if (u, w) in seen:
                raise ValueError(f"duplicate edge ({u}, {w})")
            seen.add((u, w))
        object.__setattr__(self, "edges", edges)

    @classmethod
    def from_edges(cls, n_vertices: int, edges) -> "MaxCutGraph":
        return cls(n_vertices, tuple((min(u, w), max(u, w)) for u, w in edges))

    def cut_size(self, x: Sequence[int]) -> int:
        return sum(1 for u, w in self.edges if x[u] != x[w])

    def to_edgelist(self) -> str:
        lines = [f"{self.n_vertices} {len(self.edges)}"] + [f"{u} {w}" for u, w in self.edges]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_edgelist(cls, text: str) -> "MaxCutGraph":
        lines = [(i, ln.strip()) for i, ln in enumerate(text.splitlines(), 1)]
        lines = [(i, ln) for i, ln in lines if ln and not ln.startswith("#")]
        if not lines:
            raise InstanceFormatError("line 1: empty edge list")
        i0, header = lines[0]
        try:
            nv, ne = (int(t) for t in header.split())
        except ValueError:
            raise InstanceFormatError(f"line {i0}: expected 'n_vertices n_edges', got {header!r}") from None
        body = lines[1:]
        if len(body) != ne:
            raise InstanceFormatError(f"line {i0}: header promises {ne} edges, found {len(body)}")
        edges = []
        seen = set()
        for i, ln in body:
            try:
                u, w = (int(t) for t in ln.split())
            except ValueError:
                raise InstanceFormatError(f"line {i}: expected 'u w', got {ln!r}") from None
            if u == w or not (0 <= u < nv and 0 <= w < nv):
                raise InstanceFormatError(f"line {i}: invalid edge ({u}, {w}) for {nv} vertices")
            e = (min(u, w), max(u, w))
            if e in seen:
                raise InstanceFormatError(f"line {i}: duplicate edge {e}")
            seen.add(e)
            edges.append(e)
        return cls(nv, tuple(edges))


def maxcut_to_xorsat(g: MaxCutGraph) -> XorsatInstance:
    """One XOR constraint ``x_u + x_w = 1`` per edge."""
    if not g.edges:
        raise ValueError("graph has no edges")
    rows = []
    for u, w in g.edges:
        row = [0] * g.n_vertices
        row[u] = row[w] = 1
        rows.append(row)
    return XorsatInstance(BitMatrix.from_rows(rows), BitVector.ones(len(g.edges)))


def _row_masks(inst: XorsatInstance) -> np.ndarray:
    # variable j is bit (n-1-j) of an assignment index, matching the simulator
    n = inst.n
    return np.array(
        [sum(((r >> j) & 1) << (n - 1 - j) for j in range(n)) for r in inst.B.data], dtype=np.int64
    )


def objective(inst: XorsatInstance, x) -> int:
    """f(x) = sum_i (-1)^(v_i + b_i . x): satisfied minus unsatisfied constraints."""
    x = x if isinstance(x, BitVector) else BitVector(tuple(x))
    if len(x) != inst.n:
        raise ValueError(f"x has length {len(x)}, expected {inst.n}")
    total = 0
    for i in range(inst.m):
        total += 1 - 2 * (inst.v[i] ^ inst.B.row(i).dot(x))
    return total


def objective_values(inst: XorsatInstance) -> np.ndarray:
    """f over all 2**n assignments, indexed with variable 0 as the most significant bit."""
    if inst.n > MAX_BRUTE_FORCE_VARS:
        raise ValueError(f"brute force limited to n <= {MAX_BRUTE_FORCE_VARS}")
    xs = np.arange(2**inst.n, dtype=np.int64)
    f = np.zeros(xs.size, dtype=np.int64)
    for mask, vi in zip(_row_masks(inst), inst.v.bits):
        parity = (np.bitwise_count(xs & mask) & 1).astype(np.int64)
        f += 1 - 2 * (parity ^ vi)
    return f


@dataclass(frozen=True)
class ObjectiveTable:
    n: int
    values: np.ndarray
    max_value: int
    argmax: tuple[str, ...]

    def f(self, x: str | int) -> int:
        return int(self.values[int(x, 2) if isinstance(x, str) else x])

    def satisfied(self, m: int) -> np.ndarray:
        return (self.values + m) // 2


def brute_force_optimum(inst: XorsatInstance) -> ObjectiveTable:
    f = objective_values(inst)
    best = int(f.max())
    arg = tuple(format(int(i), f"0{inst.n}b") for i in np.flatnonzero(f == best))
    return ObjectiveTable(inst.n, f, best, arg)


def expected_satisfied_fraction(m: int, ell: int, p: int = 2, r: int = 1) -> float:
    """Asymptotic <s>/m for optimal weights and a decoder that corrects ell errors."""
    if not 1 <= ell <= m:
        raise ValueError(f"need 1 <= ell <= m, got ell={ell}, m={m}")
    rho, mu = r / p, ell / m
    if rho > 1 - mu:
        return 1.0
    return (math.sqrt(mu * (1 - rho)) + math.sqrt(rho * (1 - mu))) ** 2


def random_maxcut(n_vertices: int, n_edges: int, rng: np.random.Generator, connected: bool = True) -> MaxCutGraph:
    """Uniform simple graph with the given size, resampled until connected if asked."""
    pairs = [(u, w) for u in range(n_vertices) for w in range(u + 1, n_vertices)]
    if n_edges > len(pairs):
        raise ValueError("too many edges for a simple graph")
    if connected and n_edges < n_vertices - 1:
        raise ValueError("too few edges for a connected graph")
    while True:
        pick = rng.choice(len(pairs), size=n_edges, replace=False)
        g = MaxCutGraph(n_vertices, tuple(sorted(pairs[i] for i in pick)))
        if not connected or _is_connected(g):
            return g


def cycle_maxcut(n_vertices: int) -> MaxCutGraph:
    """Ring 0-1-...-(n-1)-0: the benchmark family with as many edges as vertices."""
    if n_vertices < 3:
        raise ValueError("a cycle needs at least 3 vertices")
    return MaxCutGraph.from_edges(n_vertices, [(i, (i + 1) % n_vertices) for i in range(n_vertices)])


def _is_connected(g: MaxCutGraph) -> bool:
    parent = list(range(g.n_vertices))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for u, w in g.edges:
        parent[find(u)] = find(w)
    return len({find(a) for a in range(g.n_vertices)}) == 1


def random_invertible_instance(size: int, rng: np.random.Generator) -> XorsatInstance:
    B = BitMatrix.random_invertible(size, rng)
    v = BitVector(tuple(int(b) for b in rng.integers(0, 2, size=size)))
    return XorsatInstance(B, v)


def six_bit_instance() -> XorsatInstance:
    """The worked 6-variable MaxCut example (6 edges, v = all ones)."""
    B = BitMatrix.from_rows(
        [
            [1, 0, 0, 0, 0, 1],
            [1, 1, 0, 0, 0, 0],
            [0, 1, 0, 0, 1, 0],
            [0, 1, 0, 1, 0, 0],
            [0, 1, 0, 0, 0, 1],
            [0, 0, 0, 1, 0, 1],
        ]
    )
    return XorsatInstance(B, BitVector.ones(6))
