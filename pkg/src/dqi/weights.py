"""Optimal DQI weights from the principal eigenvector of a tridiagonal matrix."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "TridiagonalSpec",
    "WeightVector",
    "ConvergenceError",
    "build_matrix",
    "principal_eigenvector",
    "optimal_weights",
]


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class TridiagonalSpec:
    m: int
    ell: int
    p: int = 2
    r: int = 1

    def __post_init__(self):
        if not 1 <= self.ell <= self.m:
            raise ValueError(f"need 1 <= ell <= m, got ell={self.ell}, m={self.m}")
        if self.p < 2 or not 1 <= self.r < self.p:
            raise ValueError(f"need p >= 2 and 1 <= r < p, got p={self.p}, r={self.r}")

    @property
    def d(self) -> float:
        return (self.p - 2 * self.r) / math.sqrt(self.r * (self.p - self.r))

    @property
    def a(self) -> np.ndarray:
        """Off-diagonal entries a_1..a_ell, a_k = sqrt(k (m - k + 1))."""
        k = np.arange(1, self.ell + 1)
        return np.sqrt(k * (self.m - k + 1.0))


@dataclass(frozen=True)
class WeightVector:
    w: np.ndarray
    eigenvalue: float

    @property
    def ell(self) -> int:
        return self.w.size - 1

    def to_list(self) -> list[float]:
        return [float(x) for x in self.w]


def build_matrix(spec: TridiagonalSpec) -> np.ndarray:
    """(ell+1)x(ell+1) symmetric matrix with diagonal k*d and off-diagonal a_k."""
    n = spec.ell + 1
    A = np.diag(spec.d * np.arange(n, dtype=float))
    a = spec.a
    A[np.arange(n - 1), np.arange(1, n)] = a
    A[np.arange(1, n), np.arange(n - 1)] = a
    return A


def principal_eigenvector(A: np.ndarray, tol: float = 1e-12, max_iter: int = 100_000) -> WeightVector:
    """Eigenpair of the largest eigenvalue by shifted power iteration.

    Shifting by the largest absolute row sum makes every eigenvalue of
    ``A + shift*I`` non-negative, so the top eigenvalue of ``A`` dominates.
    The returned vector has unit norm and its largest-magnitude entry positive.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("expected a square matrix")
    if not np.allclose(A, A.T):
        raise ValueError("matrix must be symmetric")
    n = A.shape[0]
    shift = float(np.max(np.sum(np.abs(A), axis=1)))
    S = A + shift * np.eye(n)
    x = np.ones(n) / math.sqrt(n)
    for _ in range(max_iter):
        y = S @ x
        norm = np.linalg.norm(y)
        if norm == 0.0:
            # A = -shift*I only when A == 0; any unit vector is an eigenvector
            break
        y /= norm
        if np.max(np.abs(y - x)) < tol:
            x = y
            break
        x = y
    else:
        raise ConvergenceError(f"power iteration did not converge in {max_iter} steps")
    lam = float(x @ A @ x)
    if np.max(np.abs(A @ x - lam * x)) > 1e-10:
        # slow tail: finish with Rayleigh-quotient polishing steps
        for _ in range(50):
            try:
                y = np.linalg.solve(A - (lam + 1e-13) * np.eye(n), x)
            except np.linalg.LinAlgError:
                break
            x = y / np.linalg.norm(y)
            lam = float(x @ A @ x)
            if np.max(np.abs(A @ x - lam * x)) < 1e-12:
                break
        if np.max(np.abs(A @ x - lam * x)) > 1e-10:
            raise ConvergenceError("residual above 1e-10 after power iteration")
    if x[np.argmax(np.abs(x))] < 0:
        x = -x
    return WeightVector(x, lam)


def optimal_weights(m: int, ell: int, p: int = 2, r: int = 1) -> WeightVector:
    if ell == 0:
        return WeightVector(np.array([1.0]), 0.0)
    return principal_eigenvector(build_matrix(TridiagonalSpec(m, ell, p, r)))
