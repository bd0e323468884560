"""Error metrics, test grids, boundary traces and multi-seed statistics."""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from .basis import DerivOrder, ElmBasis, as_order, eval_feature_derivs
from .cases import CaseDefinition
from .geometry import PHASE1, PHASE2, classify

CHUNK = 65536


def relative_l2(exact, predicted) -> float:
    """||exact - predicted||_2 / ||exact||_2."""
    e = np.asarray(exact, dtype=np.float64).ravel()
    p = np.asarray(predicted, dtype=np.float64).ravel()
    if e.shape != p.shape or e.size == 0:
        raise ValueError(f"need equal non-empty vectors, got {e.shape} and {p.shape}")
    denom = np.linalg.norm(e)
    if denom == 0.0:
        raise ValueError("relative L2 error is undefined for a zero exact vector")
    return float(np.linalg.norm(e - p) / denom)


@dataclass(frozen=True, eq=False)
class ErrorGrid:
    points: np.ndarray
    exact: np.ndarray
    predicted: np.ndarray
    field_index: int

    @property
    def abs_error(self) -> np.ndarray:
        return np.abs(self.exact - self.predicted)

    @property
    def relative_l2(self) -> float:
        return relative_l2(self.exact, self.predicted)


@dataclass(frozen=True, eq=False)
class FieldEvaluation:
    grids: list
    per_field: list
    aggregate: float


def predict(basis: ElmBasis, weights, points, order=None) -> np.ndarray:
    """``D^order (H @ weights)`` at each point, evaluated in chunks."""
    pts = np.atleast_2d(points)
    order = DerivOrder.zero(basis.input_dim) if order is None else as_order(order)
    out = np.empty(len(pts))
    for i in range(0, len(pts), CHUNK):
        out[i:i + CHUNK] = eval_feature_derivs(basis, pts[i:i + CHUNK], order) @ weights
    return out


def build_test_grid(case: CaseDefinition, field_index: int, n_space: int = 100, n_time: int = 100):
    """Uniform grid over the phase's bounding box, clipped to the phase.

    Points within the interface tolerance are kept for both phases.
    """
    dom, bnd = case.domain, case.boundary
    t = np.linspace(*dom.t_range, n_time)
    if dom.spatial_dim == 2:
        y = np.linspace(*dom.y_range, n_space)
        yy, tt = np.meshgrid(y, t, indexing="ij")
        s = bnd.at(yy, tt)
    else:
        y = None
        s = bnd.at(None, t)
    region = case.regions[field_index]
    x_lo, x_hi = dom.x_range
    if region == PHASE1:
        x = np.linspace(x_lo, float(np.max(s)), n_space)
    else:
        x = np.linspace(float(np.min(s)), x_hi, n_space)
    if y is None:
        xx, tt = np.meshgrid(x, t, indexing="ij")
        pts = dom.join(xx.ravel(), None, tt.ravel())
    else:
        xx, yy, tt = np.meshgrid(x, y, t, indexing="ij")
        pts = dom.join(xx.ravel(), yy.ravel(), tt.ravel())
    wrong = PHASE2 if region == PHASE1 else PHASE1
    keep = classify(bnd, pts) != wrong
    if not keep.any():
        raise ValueError(f"test grid for field {field_index} is empty")
    return pts[keep]


def evaluate_field(case: CaseDefinition, basis: ElmBasis, theta, n_space: int = 100, n_time: int = 100):
    """Predicted vs exact on the test grid of every field."""
    M = basis.n_neurons
    theta = np.asarray(theta, dtype=np.float64)
    if theta.shape != (case.n_fields * M,):
        raise ValueError(f"theta must have {case.n_fields * M} entries, got {theta.shape}")
    grids = []
    for j in range(case.n_fields):
        pts = build_test_grid(case, j, n_space, n_time)
        exact = case.exact_fields[j](pts)
        pred = predict(basis, theta[j * M:(j + 1) * M], pts)
        grids.append(ErrorGrid(pts, exact, pred, j))
    per_field = [g.relative_l2 for g in grids]
    aggregate = relative_l2(np.concatenate([g.exact for g in grids]), np.concatenate([g.predicted for g in grids]))
    return FieldEvaluation(grids, per_field, aggregate)


@dataclass(frozen=True, eq=False)
class Trace:
    target: str
    points: np.ndarray
    coord: np.ndarray
    exact: np.ndarray
    predicted: np.ndarray

    @property
    def t(self):
        return self.points[:, -1]

    @property
    def abs_error(self):
        return np.abs(self.exact - self.predicted)

    @property
    def relative_l2(self):
        return relative_l2(self.exact, self.predicted)


def boundary_trace(case: CaseDefinition, basis: ElmBasis, theta, target_name: str, n_samples: int = 101) -> Trace:
    """Reconstructed vs exact trace of a registered target.

    1D targets use ``n_samples`` time levels; 2D targets a
    ``n_samples x n_samples`` net over (coordinate, t).
    """
    if target_name not in case.targets:
        raise KeyError(f"case {case.case_id} has no target {target_name!r}; known: {sorted(case.targets)}")
    tgt = case.targets[target_name]
    M = basis.n_neurons
    pts = tgt.points(n_samples)
    pred = predict(basis, np.asarray(theta)[tgt.field * M:(tgt.field + 1) * M], pts, tgt.order)
    return Trace(target_name, pts, pts[:, tgt.coord_axis], tgt.exact(pts), pred)


@dataclass
class TrialStats:
    seeds: list
    l2: list = field(default_factory=list)
    times: list = field(default_factory=list)
    failures: dict = field(default_factory=dict)

    def _ok(self):
        return [v for v in self.l2 if v is not None]

    @property
    def min(self):
        return float(np.min(self._ok()))

    @property
    def median(self):
        return float(np.median(self._ok()))

    @property
    def max(self):
        return float(np.max(self._ok()))

    @property
    def spread(self):
        """max / min of the successful per-seed errors."""
        return self.max / self.min

    def as_dict(self):
        ok = self._ok()
        out = {
            "seeds": list(self.seeds),
            "l2": self.l2,
            "wall_time": self.times,
            "failures": {str(k): v for k, v in self.failures.items()},
            "n_success": len(ok),
        }
        if ok:
            out.update(l2_min=self.min, l2_median=self.median, l2_max=self.max, spread_ratio=self.spread)
        return out


def robustness_trial(config, seeds, n_space=None, n_time=None) -> TrialStats:
    """Run the full pipeline once per seed and collect the aggregate L2."""
    from .pipeline import solve_case

    seeds = list(seeds)
    if len(seeds) < 2:
        raise ValueError("a robustness trial needs at least two seeds")
    stats = TrialStats(seeds)
    for seed in seeds:
        t0 = time.perf_counter()
        try:
            sol = solve_case(replace(config, seed=seed))
            ev = evaluate_field(sol.case, sol.basis, sol.theta,
                                n_space or sol.config.grid, n_time or sol.config.grid_t)
            stats.l2.append(ev.aggregate)
        except Exception as exc:  # recorded, the trial goes on
            stats.l2.append(None)
            stats.failures[seed] = f"{type(exc).__name__}: {exc}"
        stats.times.append(time.perf_counter() - t0)
    return stats
