"""Finite-difference oracle for the analytic feature derivatives.

Only :func:`eval_features` is used here, never the closed-form
derivatives, so the check is independent of the path it verifies.
Each stencil is Richardson-extrapolated (h, h/2) to fourth order.
"""

from __future__ import annotations

import numpy as np

from .basis import ElmBasis, as_order, eval_feature_derivs, eval_features, init_basis, make_rng

REL_TOL = 1e-6
ABS_TOL = 1e-8
SMALL = 1e-2


def _fd(f, p, order, h):
    axes = [i for i, a in enumerate(order) for _ in range(a)]
    e = np.eye(len(p))
    if len(axes) == 1:
        i = axes[0]
        return (f(p + h * e[i]) - f(p - h * e[i])) / (2 * h)
    i, j = axes
    if i == j:
        return (f(p + h * e[i]) - 2 * f(p) + f(p - h * e[i])) / h**2
    return (f(p + h * (e[i] + e[j])) - f(p + h * (e[i] - e[j]))
            - f(p - h * (e[i] - e[j])) + f(p - h * (e[i] + e[j]))) / (4 * h**2)


def finite_difference(basis: ElmBasis, point, order, h=None) -> np.ndarray:
    """Richardson-extrapolated central difference of every feature."""
    order = as_order(order).orders
    if sum(order) == 0:
        return eval_features(basis, point)
    if h is None:
        h = 1e-3 if sum(order) == 1 else 1e-2
    p = np.asarray(point, dtype=np.float64)
    f = lambda q: eval_features(basis, q)  # noqa: E731
    return (4.0 * _fd(f, p, order, h / 2) - _fd(f, p, order, h)) / 3.0


def derivative_errors(analytic, reference):
    """Per-entry error, relative where |reference| >= SMALL and absolute below."""
    analytic, reference = np.asarray(analytic), np.asarray(reference)
    small = np.abs(reference) < SMALL
    rel = np.abs(analytic - reference) / np.where(small, 1.0, np.abs(reference))
    ok = np.where(small, np.abs(analytic - reference) <= ABS_TOL, rel <= REL_TOL)
    return rel, ok


def all_orders(d):
    """All multi-indices with total order 1 or 2 in d coordinates."""
    out = []
    for i in range(d):
        out.append(tuple(int(k == i) for k in range(d)))
        for j in range(i, d):
            o = [0] * d
            o[i] += 1
            o[j] += 1
            out.append(tuple(o))
    return out


def derivative_probe_suite(n_probes=200, seed=0, M=32):
    """Compare analytic and finite-difference derivatives on random probes.

    Returns ``(n_failed, worst_relative_error, first_failure)``.
    """
    rng = make_rng(seed, 99)
    worst, failed, first = 0.0, 0, None
    for k in range(n_probes):
        d = 2 if k % 2 == 0 else 3
        basis = init_basis(d, M, seed * 100003 + k, (-1.0, 1.0))
        point = rng.uniform(-1.0, 2.0, d)
        orders = all_orders(d)
        order = orders[int(rng.integers(len(orders)))]
        ana = eval_feature_derivs(basis, point, order)
        ref = finite_difference(basis, point, order)
        rel, ok = derivative_errors(ana, ref)
        big = np.abs(ref) >= SMALL
        if big.any():
            worst = max(worst, float(rel[big].max()))
        if not ok.all():
            failed += 1
            if first is None:
                first = (k, d, order, point.tolist())
    return failed, worst, first
