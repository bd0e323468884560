"""Minimum-norm least squares through a truncated SVD.

The textbook ELM formula ``(H^T H)^{-1} H^T y`` is the mathematical
definition only; forming the normal equations squares the condition
number, which for tanh features is already ~1e16.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

DEFAULT_RCOND = 1e-15


@dataclass(frozen=True)
class SolveDiagnostics:
    rank: int
    sigma_max: float
    sigma_min_kept: float
    rcond_used: float
    residual_norm: float
    solve_time: float
    shape: tuple = (0, 0)

    def as_dict(self):
        return {
            "rank": self.rank,
            "sigma_max": self.sigma_max,
            "sigma_min_kept": self.sigma_min_kept,
            "rcond_used": self.rcond_used,
            "residual_norm": self.residual_norm,
            "solve_time": self.solve_time,
            "rows": self.shape[0],
            "cols": self.shape[1],
        }


def _check(A, r=None):
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or min(A.shape) < 1:
        raise ValueError(f"matrix must be 2D and non-empty, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    if r is None:
        return A
    r = np.asarray(r, dtype=np.float64)
    if r.shape != (A.shape[0],):
        raise ValueError(f"rhs shape {r.shape} does not match {A.shape[0]} rows")
    if not np.all(np.isfinite(r)):
        raise ValueError("rhs has non-finite entries")
    return A, r


def solve_min_norm(A, r, rcond: float = DEFAULT_RCOND):
    """Return ``(theta, diagnostics)`` minimising ||A theta - r||, then ||theta||.

    Singular values below ``rcond * sigma_max`` are treated as zero.
    """
    A, r = _check(A, r)
    if not 0.0 < rcond < 1.0:
        raise ValueError(f"rcond must lie in (0, 1), got {rcond}")
    t0 = time.perf_counter()
    n = A.shape[1]
    if not np.any(A):
        theta = np.zeros(n)
        return theta, SolveDiagnostics(0, 0.0, 0.0, rcond, float(np.linalg.norm(r)),
                                       time.perf_counter() - t0, A.shape)
    U, s, Vt = np.linalg.svd(A, full_matrices=False)
    keep = s > rcond * s[0]
    rank = int(keep.sum())
    coef = (U[:, :rank].T @ r) / s[:rank]
    theta = Vt[:rank].T @ coef
    elapsed = time.perf_counter() - t0
    res = float(np.linalg.norm(A @ theta - r))
    return theta, SolveDiagnostics(rank, float(s[0]), float(s[rank - 1]), rcond, res, elapsed, A.shape)


def null_space_basis(A, rcond: float = DEFAULT_RCOND) -> np.ndarray:
    """Right singular vectors discarded by :func:`solve_min_norm` (as columns)."""
    A = _check(A)
    _, s, Vt = np.linalg.svd(A, full_matrices=True)
    rank = int(np.sum(s > rcond * s[0])) if s.size and s[0] > 0 else 0
    return Vt[rank:].T


def condition_report(A):
    """``(sigma_max, sigma_min, sigma_max / sigma_min)`` over the full spectrum."""
    A = _check(A)
    s = np.linalg.svd(A, compute_uv=False)
    if min(A.shape) < max(A.shape) and A.shape[0] < A.shape[1]:
        # wide matrix: the trailing min(m, n)..n singular values are zero
        smin = 0.0
    else:
        smin = float(s[-1])
    smax = float(s[0])
    ratio = np.inf if smin == 0.0 else smax / smin
    return smax, smin, ratio
