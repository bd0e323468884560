import numpy as np
import pytest

from pielm.cases import case1, case2, case3, case4
from pielm.geometry import (
    INTERFACE,
    PHASE1,
    PHASE2,
    MovingBoundary,
    SpaceTimeDomain,
    classify,
    interface_position,
    sample_fixed_boundary,
    sample_interface,
    sample_phase_interior,
    sample_time_slice,
    unit_samples,
)

S0_CASE1 = 0.2679491924311227  # 2 - sqrt(3)


@pytest.fixture(scope="module")
def cases():
    return {1: case1(), 2: case2(), 3: case3(), 4: case4()}


def test_interface_position_examples(cases):
    b1 = cases[1].boundary
    assert interface_position(b1, None, 0.0) == pytest.approx(S0_CASE1, rel=1e-15)
    assert interface_position(b1, None, 1.0) == 1.0
    assert interface_position(cases[3].boundary, 0.0, 0.0) == 0.5


def test_interface_position_range_errors(cases):
    with pytest.raises(ValueError):
        interface_position(cases[1].boundary, None, 1.5)
    with pytest.raises(ValueError):
        interface_position(cases[3].boundary, 1.2, 0.5)
    with pytest.raises(ValueError):
        interface_position(cases[3].boundary, None, 0.5)


def test_classify_examples(cases):
    b = cases[2].boundary
    assert classify(b, [0.1, 0.0]) == PHASE1
    assert classify(b, [1.9, 0.0]) == PHASE2
    assert classify(b, [0.5, 0.0]) == INTERFACE
    assert classify(b, [0.75, 0.25]) == INTERFACE


def test_boundary_must_stay_inside():
    dom = SpaceTimeDomain((0.0, 1.0), (0.0, 1.0))
    with pytest.raises(ValueError):
        MovingBoundary(dom, lambda y, t: 0.5 + np.asarray(t))


def test_domain_rejects_degenerate_interval():
    with pytest.raises(ValueError):
        SpaceTimeDomain((1.0, 1.0), (0.0, 1.0))


@pytest.mark.parametrize("cid", [1, 2, 3, 4])
def test_interior_samples_stay_in_region(cases, cid):
    case = cases[cid]
    for region in case.regions:
        pts = sample_phase_interior(case.domain, case.boundary, region, 1000, seed=cid).points
        assert np.all(classify(case.boundary, pts) == region)
        assert np.all(case.domain.contains(pts))


def test_case1_interior_defaults(cases):
    c = cases[1]
    pts = sample_phase_interior(c.domain, c.boundary, PHASE1, 100, seed=0).points
    assert pts.shape == (100, 2)
    assert np.all((pts[:, 0] > 0) & (pts[:, 0] < c.boundary.at(None, pts[:, 1])))


def test_sampling_is_deterministic(cases):
    c = cases[4]
    a = sample_phase_interior(c.domain, c.boundary, PHASE2, 50, seed=3).points
    b = sample_phase_interior(c.domain, c.boundary, PHASE2, 50, seed=3).points
    assert np.array_equal(a, b)
    f1 = sample_fixed_boundary(c.domain, c.boundary, "y_hi", 20, 4, region=PHASE1).points
    f2 = sample_fixed_boundary(c.domain, c.boundary, "y_hi", 20, 4, region=PHASE1).points
    assert np.array_equal(f1, f2)


def test_monotone_coverage(cases):
    c = cases[3]
    small = sample_phase_interior(c.domain, c.boundary, PHASE1, 100, seed=8).points
    big = sample_phase_interior(c.domain, c.boundary, PHASE1, 200, seed=8).points
    assert np.array_equal(small, big[:100])


def test_time_slice_case1(cases):
    c = cases[1]
    pts = sample_time_slice(c.domain, c.boundary, PHASE1, 0.0, 50, seed=1).points
    assert len(pts) == 50
    assert np.all(pts[:, 1] == 0.0)
    assert np.all((pts[:, 0] >= 0.0) & (pts[:, 0] <= S0_CASE1))
    with pytest.raises(ValueError):
        sample_time_slice(c.domain, c.boundary, PHASE1, 1.5, 5, seed=1)


def test_final_slice_two_phase(cases):
    c = cases[2]
    pts = sample_time_slice(c.domain, c.boundary, PHASE2, 1.0, 30, seed=2).points
    assert np.all(pts[:, 1] == 1.0)
    assert np.all(pts[:, 0] > 1.5)


@pytest.mark.parametrize("cid", [1, 2, 3, 4])
def test_interface_samples_exact(cases, cid):
    c = cases[cid]
    pts = sample_interface(c.domain, c.boundary, 500, seed=1).points
    assert np.all(classify(c.boundary, pts) == INTERFACE)
    assert np.all(pts[:, 0] == c.boundary.at_points(pts))
    assert np.all((pts[:, 0] > 0) & (pts[:, 0] < c.domain.x_range[1]))


def test_case1_interface_formula(cases):
    c = cases[1]
    pts = sample_interface(c.domain, c.boundary, 100, seed=0).points
    np.testing.assert_allclose(pts[:, 0], 2 - np.sqrt(3 - 2 * pts[:, 1]), rtol=0, atol=0)


def test_fixed_faces_case4(cases):
    c = cases[4]
    pts = sample_fixed_boundary(c.domain, c.boundary, "x_lo", 40, seed=1).points
    assert np.all(pts[:, 0] == 0.0)
    assert np.all((pts[:, 1:] >= 0) & (pts[:, 1:] <= 1))
    pts = sample_fixed_boundary(c.domain, c.boundary, "y_lo", 40, seed=1, region=PHASE1).points
    assert np.all(pts[:, 1] == 0.0)
    assert np.all(pts[:, 0] <= c.boundary.at(0.0, pts[:, 2]))
    pts = sample_fixed_boundary(c.domain, c.boundary, "y_lo", 40, seed=1, region=PHASE2).points
    assert np.all(classify(c.boundary, pts) == PHASE2)


def test_fixed_face_errors(cases):
    with pytest.raises(ValueError):
        sample_fixed_boundary(cases[1].domain, cases[1].boundary, "y_lo", 5, 0, region=PHASE1)
    with pytest.raises(ValueError):
        sample_fixed_boundary(cases[4].domain, cases[4].boundary, "y_lo", 5, 0)
    with pytest.raises(ValueError):
        sample_fixed_boundary(cases[4].domain, cases[4].boundary, "z_lo", 5, 0)


def test_grid_strategy(cases):
    u = unit_samples(10, 2, 0, 0, "grid")
    assert u.shape == (10, 2) and len(np.unique(u, axis=0)) == 10
    c = cases[2]
    pts = sample_phase_interior(c.domain, c.boundary, PHASE2, 64, seed=0, strategy="grid").points
    assert np.all(classify(c.boundary, pts) == PHASE2)
    with pytest.raises(ValueError):
        unit_samples(5, 2, 0, 0, "sobol")
