import numpy as np
import pytest

from pielm.solver import condition_report, null_space_basis, solve_min_norm


def test_identity():
    theta, diag = solve_min_norm(np.eye(2), [1.0, 2.0])
    np.testing.assert_allclose(theta, [1.0, 2.0], rtol=1e-15)
    assert diag.rank == 2


def test_rank_deficient_min_norm():
    # minimum-norm point on theta1 + theta2 = 2
    theta, diag = solve_min_norm(np.array([[1.0, 1.0], [1.0, 1.0]]), [2.0, 2.0])
    np.testing.assert_allclose(theta, [1.0, 1.0], rtol=1e-14)
    assert diag.rank == 1


def test_overdetermined_column():
    theta, _ = solve_min_norm(np.array([[1.0], [1.0]]), [2.0, 2.0])
    np.testing.assert_allclose(theta, [2.0], rtol=1e-15)


def test_zero_matrix():
    theta, diag = solve_min_norm(np.zeros((3, 2)), [1.0, 0.0, 0.0])
    assert np.all(theta == 0) and diag.rank == 0


@pytest.mark.parametrize("A, r", [
    (np.array([[np.nan, 1.0]]), [1.0]),
    (np.eye(2), [1.0, np.inf]),
    (np.eye(2), [1.0]),
])
def test_bad_inputs(A, r):
    with pytest.raises(ValueError):
        solve_min_norm(A, r)


def test_rcond_range():
    with pytest.raises(ValueError):
        solve_min_norm(np.eye(2), [1, 1], rcond=0.0)


def test_diagnostics_invariants():
    rng = np.random.default_rng(0)
    A = rng.normal(size=(20, 8)) @ np.diag(10.0 ** -np.arange(8))
    _, d = solve_min_norm(A, rng.normal(size=20), rcond=1e-5)
    assert d.rank <= 8
    assert d.sigma_max >= d.sigma_min_kept > 0
    assert d.sigma_min_kept > 1e-5 * d.sigma_max


def test_condition_report():
    assert condition_report(np.eye(3))[2] == 1.0
    assert condition_report(np.diag([2.0, 1e-8]))[2] == pytest.approx(2e8, rel=1e-12)
    smax, smin, ratio = condition_report(np.array([[1.0, 2.0], [2.0, 4.0]]))
    assert smin <= 1e-15 * smax


def test_null_space_of_rank_one():
    N = null_space_basis(np.array([[1.0, 1.0], [1.0, 1.0]]))
    assert N.shape == (2, 1)
    np.testing.assert_allclose(np.abs(N[:, 0]), [2**-0.5, 2**-0.5], rtol=1e-14)


@pytest.mark.parametrize("name", ["optimality", "min_norm", "recovery", "normal_residual"])
@pytest.mark.parametrize("seed", range(10))
def test_solver_properties(name, seed):
    from helpers import PROPERTIES

    assert PROPERTIES[name](seed)
