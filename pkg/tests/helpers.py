"""Randomised solver property checks shared by unit and acceptance tests."""

import numpy as np

from pielm.solver import DEFAULT_RCOND, null_space_basis, solve_min_norm


def random_instance(seed, full_rank=None):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(5, 40))
    n = int(rng.integers(2, 25))
    if full_rank is None:
        full_rank = bool(rng.integers(2))
    if full_rank:
        n = min(n, m)
        U, _ = np.linalg.qr(rng.normal(size=(m, n)))
        V, _ = np.linalg.qr(rng.normal(size=(n, n)))
        A = U @ np.diag(np.logspace(0, -rng.uniform(0, 6), n)) @ V.T
    else:
        k = int(rng.integers(1, min(m, n)))
        A = rng.normal(size=(m, k)) @ rng.normal(size=(k, n))
    return A, rng.normal(size=m), rng


def optimality(seed, n_probes=100):
    A, r, rng = random_instance(seed)
    theta, _ = solve_min_norm(A, r)
    best = np.linalg.norm(A @ theta - r)
    tol = 1e-12 * np.linalg.norm(r)
    for _ in range(n_probes):
        t = theta + rng.normal(size=theta.size) * 10.0 ** rng.uniform(-8, 1)
        if not best <= np.linalg.norm(A @ t - r) + tol:
            return False
    return True


def min_norm(seed):
    A, r, rng = random_instance(seed, full_rank=False)
    theta, _ = solve_min_norm(A, r)
    N = null_space_basis(A, DEFAULT_RCOND)
    if N.shape[1] == 0:
        return False
    for _ in range(20):
        v = N @ rng.normal(size=N.shape[1])
        if not np.linalg.norm(theta + v) > np.linalg.norm(theta):
            return False
    return True


def recovery(seed):
    A, _, rng = random_instance(seed, full_rank=True)
    theta_true = rng.normal(size=A.shape[1])
    r = A @ theta_true
    theta, _ = solve_min_norm(A, r)
    nr = np.linalg.norm(r)
    return (np.linalg.norm(A @ theta - r) <= 1e-10 * nr
            and np.linalg.norm(A @ theta - A @ theta_true) <= 1e-10 * nr)


def normal_residual(seed):
    A, r, _ = random_instance(seed)
    theta, diag = solve_min_norm(A, r)
    return np.linalg.norm(A.T @ (A @ theta - r)) <= 1e-8 * diag.sigma_max * np.linalg.norm(r)


PROPERTIES = {
    "optimality": optimality,
    "min_norm": min_norm,
    "recovery": recovery,
    "normal_residual": normal_residual,
}
