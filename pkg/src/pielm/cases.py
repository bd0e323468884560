"""The four benchmark inverse Stefan problems.

Each case carries its geometry, the roster of linear laws that the
solver enforces, closed-form exact fields (with hand-written derivatives)
and the boundary traces that the inverse problem is meant to recover.
Roster data functions are transcribed from the problem statements
independently of the exact fields, so :func:`verify_case_consistency`
actually checks the transcription.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .basis import DerivOrder, as_order
from .constraints import LinearConstraint, LinearTerm, apply_to_fields
from .geometry import (
    INTERFACE,
    PHASE1,
    PHASE2,
    MovingBoundary,
    SpaceTimeDomain,
    classify,
    sample_fixed_boundary,
    sample_interface,
    sample_phase_interior,
    sample_time_slice,
)

CONSISTENCY_TOL = 1e-9


class CaseConsistencyError(AssertionError):
    def __init__(self, label, value):
        super().__init__(f"law {label!r} violated by the exact solution: max |lhs - rhs| = {value:.3e}")
        self.label = label
        self.value = value


@dataclass(frozen=True)
class ExpField:
    """``amp * exp(grad . p + const) + offset`` with exact derivatives."""

    amp: float
    grad: tuple
    const: float
    offset: float

    def __call__(self, points, order=None):
        p = np.atleast_2d(points)
        e = self.amp * np.exp(p @ np.asarray(self.grad) + self.const)
        if order is None or as_order(order).total == 0:
            return e + self.offset
        return e * np.prod(np.asarray(self.grad) ** np.asarray(as_order(order).orders))


def _case1_field(points, order=None):
    """u = -x^2/2 + 2x - 1/2 - t."""
    p = np.atleast_2d(points)
    x, t = p[:, 0], p[:, 1]
    a = (0, 0) if order is None else as_order(order).orders
    table = {
        (0, 0): lambda: -0.5 * x**2 + 2.0 * x - 0.5 - t,
        (1, 0): lambda: 2.0 - x,
        (2, 0): lambda: -np.ones_like(x),
        (0, 1): lambda: -np.ones_like(x),
        (1, 1): lambda: np.zeros_like(x),
        (0, 2): lambda: np.zeros_like(x),
    }
    return table[a]()


@dataclass(frozen=True)
class Target:
    """A boundary trace to reconstruct: D^order u_field along a fixed face."""

    name: str
    field: int
    order: DerivOrder
    points: Callable  # n -> (k, d) points
    exact: Callable  # points -> values
    coord_axis: int = 0


@dataclass(frozen=True, eq=False)
class RosterSizes:
    n_collocation: int
    n_initial: int
    n_face: Optional[int] = None

    @property
    def face(self):
        return self.n_initial if self.n_face is None else self.n_face


@dataclass(frozen=True, eq=False)
class CaseDefinition:
    case_id: int
    title: str
    n_fields: int
    diffusivities: tuple
    domain: SpaceTimeDomain
    boundary: MovingBoundary
    exact_fields: tuple
    targets: dict
    roster_builder: Callable
    interface_temperature: float = 0.0
    options: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.domain.dim

    @property
    def regions(self):
        return (PHASE1, PHASE2)[: self.n_fields]

    def build_roster(self, sizes: RosterSizes, seed: int, strategy: str = "random"):
        """Sample every law's points; stream k+1 feeds the k-th sampled set."""
        streams = iter(range(1, 1000))
        return list(self.roster_builder(self, sizes, seed, lambda: next(streams), strategy))


# ---------------------------------------------------------------- builders

def _d(dim, *pairs):
    orders = [0] * dim
    for axis, k in pairs:
        orders[axis] = k
    return DerivOrder(tuple(orders))


def heat_terms(j, k, dim):
    """u_t - k * laplacian(u) for field j."""
    t_axis = dim - 1
    terms = [LinearTerm(j, _d(dim, (t_axis, 1)), 1.0)]
    for axis in range(dim - 1):
        terms.append(LinearTerm(j, _d(dim, (axis, 2)), -k))
    return tuple(terms)


def value_term(j, dim):
    return (LinearTerm(j, DerivOrder.zero(dim), 1.0),)


def _field_name(case, j):
    return "u" if case.n_fields == 1 else f"u{j + 1}"


def _pde(case, j, sizes, seed, nxt, strategy):
    region = case.regions[j]
    pts = sample_phase_interior(case.domain, case.boundary, region, sizes.n_collocation, seed,
                                stream=nxt(), strategy=strategy)
    return LinearConstraint(heat_terms(j, case.diffusivities[j], case.dim), 0.0, pts,
                            f"pde.{_field_name(case, j)}")


def _slice(case, j, t_star, data, kind, sizes, seed, nxt, strategy):
    pts = sample_time_slice(case.domain, case.boundary, case.regions[j], t_star, sizes.n_initial, seed,
                            stream=nxt(), strategy=strategy)
    return LinearConstraint(value_term(j, case.dim), data, pts, f"{kind}.{_field_name(case, j)}")


# ---------------------------------------------------------------- case 1

def _case1_roster(case, sizes, seed, nxt, strategy):
    dom, bnd = case.domain, case.boundary
    yield _pde(case, 0, sizes, seed, nxt, strategy)
    yield _slice(case, 0, 0.0, lambda p: -0.5 * p[:, 0] ** 2 + 2.0 * p[:, 0] - 0.5, "initial",
                 sizes, seed, nxt, strategy)
    iface = sample_interface(dom, bnd, sizes.n_collocation, seed, stream=nxt(), strategy=strategy)
    yield LinearConstraint(value_term(0, 2), 0.0, iface, "interface.u")
    yield LinearConstraint((LinearTerm(0, (1, 0), 1.0),), lambda p: np.sqrt(3.0 - 2.0 * p[:, 1]),
                           iface, "interface.flux")
    if case.options.get("include_fixed_neumann"):
        face = sample_fixed_boundary(dom, bnd, "x_lo", sizes.face, seed, stream=nxt(), strategy=strategy)
        yield LinearConstraint((LinearTerm(0, (1, 0), 1.0),), 2.0, face, "fixed.u_x")


def _trace_1d(x_val):
    def points(n):
        t = np.linspace(0.0, 1.0, n)
        return np.column_stack([np.full(n, x_val), t])
    return points


def case1(include_fixed_neumann: bool = False) -> CaseDefinition:
    """One-dimensional one-phase problem, s(t) = 2 - sqrt(3 - 2t)."""
    dom = SpaceTimeDomain(x_range=(0.0, 2.0), t_range=(0.0, 1.0))
    bnd = MovingBoundary(
        dom,
        position=lambda y, t: 2.0 - np.sqrt(3.0 - 2.0 * np.asarray(t, dtype=np.float64)),
        d_dt=lambda y, t: 1.0 / np.sqrt(3.0 - 2.0 * np.asarray(t, dtype=np.float64)),
    )
    targets = {
        "u(0,t)": Target("u(0,t)", 0, DerivOrder((0, 0)), _trace_1d(0.0),
                         lambda p: -0.5 - p[:, 1]),
        "u_x(0,t)": Target("u_x(0,t)", 0, DerivOrder((1, 0)), _trace_1d(0.0),
                           lambda p: np.full(len(p), 2.0)),
    }
    return CaseDefinition(1, "1D one-phase", 1, (1.0,), dom, bnd, (_case1_field,), targets,
                          _case1_roster, options={"include_fixed_neumann": bool(include_fixed_neumann)})


# ---------------------------------------------------------------- case 2

def _case2_roster(case, sizes, seed, nxt, strategy):
    dom, bnd = case.domain, case.boundary
    x = lambda p: p[:, 0]  # noqa: E731
    yield _pde(case, 0, sizes, seed, nxt, strategy)
    yield _pde(case, 1, sizes, seed, nxt, strategy)
    yield _slice(case, 0, 0.0, lambda p: 2.0 * np.exp((1.0 - 2.0 * x(p)) / 4.0) - 2.0, "initial",
                 sizes, seed, nxt, strategy)
    yield _slice(case, 1, 0.0, lambda p: np.exp((1.0 - 2.0 * x(p)) / 2.0) - 1.0, "initial",
                 sizes, seed, nxt, strategy)
    yield _slice(case, 0, 1.0, lambda p: 2.0 * np.exp((3.0 - 2.0 * x(p)) / 4.0) - 2.0, "final",
                 sizes, seed, nxt, strategy)
    yield _slice(case, 1, 1.0, lambda p: np.exp(1.5 - x(p)) - 1.0, "final", sizes, seed, nxt, strategy)
    iface = sample_interface(dom, bnd, sizes.n_collocation, seed, stream=nxt(), strategy=strategy)
    yield LinearConstraint(value_term(0, 2), 0.0, iface, "interface.u1")
    yield LinearConstraint(value_term(1, 2), 0.0, iface, "interface.u2")
    yield LinearConstraint((LinearTerm(0, (1, 0), -2.0), LinearTerm(1, (1, 0), 1.0)), 1.0, iface, "stefan")


def case2() -> CaseDefinition:
    """One-dimensional two-phase problem, s(t) = t + 1/2, k1 = 2, k2 = 1."""
    dom = SpaceTimeDomain(x_range=(0.0, 2.0), t_range=(0.0, 1.0))
    bnd = MovingBoundary(dom, position=lambda y, t: np.asarray(t, dtype=np.float64) + 0.5,
                         d_dt=lambda y, t: np.ones_like(np.asarray(t, dtype=np.float64)))
    u1 = ExpField(2.0, (-0.5, 0.5), 0.25, -2.0)
    u2 = ExpField(1.0, (-1.0, 1.0), 0.5, -1.0)
    targets = {
        "u1(0,t)": Target("u1(0,t)", 0, DerivOrder((0, 0)), _trace_1d(0.0),
                          lambda p: 2.0 * np.exp((2.0 * p[:, 1] + 1.0) / 4.0) - 2.0),
        "u2(2,t)": Target("u2(2,t)", 1, DerivOrder((0, 0)), _trace_1d(2.0),
                          lambda p: np.exp((2.0 * p[:, 1] - 3.0) / 2.0) - 1.0),
    }
    return CaseDefinition(2, "1D two-phase", 2, (2.0, 1.0), dom, bnd, (u1, u2), targets, _case2_roster)


# ---------------------------------------------------------------- case 3

def _case3_roster(case, sizes, seed, nxt, strategy):
    dom, bnd = case.domain, case.boundary
    yield _pde(case, 0, sizes, seed, nxt, strategy)
    yield _slice(case, 0, 0.0, lambda p: np.exp(-p[:, 0] + 0.5 * p[:, 1] + 0.5) - 1.0, "initial",
                 sizes, seed, nxt, strategy)
    yield _slice(case, 0, 1.0, lambda p: np.exp(-p[:, 0] + 0.5 * p[:, 1] + 1.75) - 1.0, "final",
                 sizes, seed, nxt, strategy)
    iface = sample_interface(dom, bnd, sizes.n_collocation, seed, stream=nxt(), strategy=strategy)
    yield LinearConstraint(value_term(0, 3), 0.0, iface, "interface.u")
    yield LinearConstraint((LinearTerm(0, (1, 0, 0), 1.0), LinearTerm(0, (0, 1, 0), -0.5)), -1.25,
                           iface, "interface.flux")


def _face_trace(case, face_axis, face_val):
    """Points along y = face_val (x in the phase-1 slab) or x = face_val (y free)."""
    def points(n):
        t = np.linspace(*case.domain.t_range, n)
        if face_axis == 1:
            tt, rho = np.meshgrid(t, np.linspace(0.0, 1.0, n), indexing="ij")
            tt, rho = tt.ravel(), rho.ravel()
            y = np.full_like(tt, face_val)
            x = case.domain.x_range[0] + rho * (case.boundary.at(y, tt) - case.domain.x_range[0])
        else:
            tt, y = np.meshgrid(t, np.linspace(*case.domain.y_range, n), indexing="ij")
            tt, y = tt.ravel(), y.ravel()
            x = np.full_like(tt, face_val)
        return case.domain.join(x, y, tt)
    return points


def case3() -> CaseDefinition:
    """Two-dimensional one-phase problem, s(y, t) = 5t/4 + y/2 + 1/2."""
    dom = SpaceTimeDomain(x_range=(0.0, 2.5), y_range=(0.0, 1.0), t_range=(0.0, 1.0))
    bnd = MovingBoundary(
        dom,
        position=lambda y, t: 1.25 * np.asarray(t) + 0.5 * np.asarray(y) + 0.5,
        d_dt=lambda y, t: np.full(np.broadcast(y, t).shape, 1.25),
        d_dy=lambda y, t: np.full(np.broadcast(y, t).shape, 0.5),
    )
    u = ExpField(1.0, (-1.0, 0.5, 1.25), 0.5, -1.0)
    case = CaseDefinition(3, "2D one-phase", 1, (1.0,), dom, bnd, (u,), {}, _case3_roster)
    x, y, t = (lambda p: p[:, 0]), (lambda p: p[:, 1]), (lambda p: p[:, 2])
    case.targets.update({
        "u(x,0,t)": Target("u(x,0,t)", 0, DerivOrder((0, 0, 0)), _face_trace(case, 1, 0.0),
                           lambda p: np.exp(1.25 * t(p) - x(p) + 0.5) - 1.0, coord_axis=0),
        "u(x,1,t)": Target("u(x,1,t)", 0, DerivOrder((0, 0, 0)), _face_trace(case, 1, 1.0),
                           lambda p: np.exp(1.25 * t(p) - x(p) + 1.0) - 1.0, coord_axis=0),
        "u(0,y,t)": Target("u(0,y,t)", 0, DerivOrder((0, 0, 0)), _face_trace(case, 0, 0.0),
                           lambda p: np.exp(1.25 * t(p) + 0.5 * y(p) + 0.5) - 1.0, coord_axis=1),
    })
    return case


# ---------------------------------------------------------------- case 4

def _case4_roster(case, sizes, seed, nxt, strategy):
    dom, bnd = case.domain, case.boundary
    x, t = (lambda p: p[:, 0]), (lambda p: p[:, 2])
    v1 = lambda p: 2.0 * np.exp((2.0 * t(p) - 2.0 * x(p) + 1.0) / 4.0) - 2.0  # noqa: E731
    v2 = lambda p: np.exp((2.0 * t(p) - 2.0 * x(p) + 1.0) / 2.0) - 1.0  # noqa: E731
    yield _pde(case, 0, sizes, seed, nxt, strategy)
    yield _pde(case, 1, sizes, seed, nxt, strategy)
    yield _slice(case, 0, 0.0, lambda p: 2.0 * np.exp((1.0 - 2.0 * x(p)) / 4.0) - 2.0, "initial",
                 sizes, seed, nxt, strategy)
    yield _slice(case, 1, 0.0, lambda p: np.exp((1.0 - 2.0 * x(p)) / 2.0) - 1.0, "initial",
                 sizes, seed, nxt, strategy)
    n = sizes.face
    pts = sample_fixed_boundary(dom, bnd, "x_lo", n, seed, stream=nxt(), strategy=strategy)
    yield LinearConstraint(value_term(0, 3), lambda p: 2.0 * np.exp((2.0 * t(p) + 1.0) / 4.0) - 2.0, pts,
                           "face.x_lo.u1")
    pts = sample_fixed_boundary(dom, bnd, "x_hi", n, seed, stream=nxt(), strategy=strategy)
    yield LinearConstraint(value_term(1, 3), lambda p: np.exp((2.0 * t(p) - 3.0) / 2.0) - 1.0, pts,
                           "face.x_hi.u2")
    for face in ("y_lo", "y_hi"):
        for j, data in ((0, v1), (1, v2)):
            pts = sample_fixed_boundary(dom, bnd, face, n, seed, region=case.regions[j], stream=nxt(),
                                        strategy=strategy)
            yield LinearConstraint(value_term(j, 3), data, pts, f"face.{face}.u{j + 1}")
    iface = sample_interface(dom, bnd, sizes.n_collocation, seed, stream=nxt(), strategy=strategy)
    yield LinearConstraint(value_term(0, 3), 0.0, iface, "interface.u1")
    yield LinearConstraint(value_term(1, 3), 0.0, iface, "interface.u2")
    s_y = lambda p: bnd.d_dy(p[:, 1], p[:, 2])  # noqa: E731
    stefan = (
        LinearTerm(0, (1, 0, 0), -2.0),
        LinearTerm(0, (0, 1, 0), lambda p: 2.0 * s_y(p)),
        LinearTerm(1, (1, 0, 0), 1.0),
        LinearTerm(1, (0, 1, 0), lambda p: -s_y(p)),
    )
    yield LinearConstraint(stefan, lambda p: bnd.d_dt(p[:, 1], p[:, 2]), iface, "stefan")


def case4() -> CaseDefinition:
    """Two-dimensional two-phase problem, s(y, t) = t + 1/2, k1 = 2, k2 = 1."""
    dom = SpaceTimeDomain(x_range=(0.0, 2.0), y_range=(0.0, 1.0), t_range=(0.0, 1.0))
    bnd = MovingBoundary(
        dom,
        position=lambda y, t: np.broadcast_to(np.asarray(t, dtype=np.float64) + 0.5, np.broadcast(y, t).shape),
        d_dt=lambda y, t: np.ones(np.broadcast(y, t).shape),
        d_dy=lambda y, t: np.zeros(np.broadcast(y, t).shape),
    )
    y = np.linspace(*dom.y_range, 101)
    if not np.allclose(bnd.at(y, np.zeros_like(y)), 0.5, rtol=0, atol=1e-15):
        raise AssertionError("initial interface must sit at x = 1/2")
    u1 = ExpField(2.0, (-0.5, 0.0, 0.5), 0.25, -2.0)
    u2 = ExpField(1.0, (-1.0, 0.0, 1.0), 0.5, -1.0)
    return CaseDefinition(4, "2D two-phase", 2, (2.0, 1.0), dom, bnd, (u1, u2), {}, _case4_roster)


CASES = {1: case1, 2: case2, 3: case3, 4: case4}


def get_case(case_id: int, **options) -> CaseDefinition:
    if case_id not in CASES:
        raise ValueError(f"unknown case {case_id}; choose from {sorted(CASES)}")
    if case_id == 1:
        return case1(**options)
    if options.get("include_fixed_neumann"):
        raise ValueError("include_fixed_neumann only applies to case 1")
    return CASES[case_id]()


# ---------------------------------------------------------------- checks

def exact_solution(case: CaseDefinition, field_index: int, point):
    """Exact temperature of field ``field_index``; rejects wrong-phase points."""
    if not 0 <= field_index < case.n_fields:
        raise ValueError(f"case {case.case_id} has {case.n_fields} field(s)")
    p = np.asarray(point, dtype=np.float64)
    tags = np.atleast_1d(classify(case.boundary, p))
    wrong = PHASE2 if field_index == 0 else PHASE1
    if np.any(tags == wrong) or not np.all(case.domain.contains(p)):
        raise ValueError(f"point outside the region of field {field_index}")
    vals = case.exact_fields[field_index](np.atleast_2d(p))
    return float(vals[0]) if p.ndim == 1 else vals


def verify_case_consistency(case: CaseDefinition, samples_per_law: int = 200, seed: int = 0,
                            tol: float = CONSISTENCY_TOL, roster=None) -> float:
    """Max |lhs - rhs| of every roster law applied to the exact fields."""
    if roster is None:
        sizes = RosterSizes(samples_per_law, samples_per_law, samples_per_law)
        roster = case.build_roster(sizes, seed)
    worst = 0.0
    for law in roster:
        r = float(np.max(np.abs(apply_to_fields(law, case.exact_fields))))
        if not r <= tol:
            raise CaseConsistencyError(law.label, r)
        worst = max(worst, r)
    return worst


def interface_compatibility(case: CaseDefinition, n: int = 100, seed: int = 0) -> float:
    """Max deviation of each exact field from u_s on sampled interface points."""
    pts = sample_interface(case.domain, case.boundary, n, seed).points
    return max(float(np.max(np.abs(f(pts) - case.interface_temperature))) for f in case.exact_fields)


__all__ = [
    "CASES",
    "INTERFACE",
    "CaseConsistencyError",
    "CaseDefinition",
    "ExpField",
    "RosterSizes",
    "Target",
    "case1",
    "case2",
    "case3",
    "case4",
    "exact_solution",
    "get_case",
    "interface_compatibility",
    "verify_case_consistency",
]
