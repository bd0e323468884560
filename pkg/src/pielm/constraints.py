"""Linear constraints on the fields and assembly of the global system.

Field j is represented as ``u_j(p) = H(p) @ theta[j*M:(j+1)*M]``, so any
law of the form ``sum_k c_k(p) D^{a_k} u_{j_k}(p) = g(p)`` becomes one row
of a dense matrix over the stacked output weights.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from .basis import DerivOrder, ElmBasis, as_order, eval_feature_derivs
from .geometry import CollocationSet

Scalar = Union[float, Callable[[np.ndarray], np.ndarray]]


class ConstraintError(ValueError):
    """A constraint produced non-finite data or is malformed."""


def _evaluate(fn: Scalar, points: np.ndarray) -> np.ndarray:
    if callable(fn):
        v = np.asarray(fn(points), dtype=np.float64)
        return np.broadcast_to(v, (len(points),))
    return np.full(len(points), float(fn))


@dataclass(frozen=True)
class LinearTerm:
    field: int
    order: DerivOrder
    coeff: Scalar = 1.0

    def __post_init__(self):
        object.__setattr__(self, "order", as_order(self.order))
        if self.field < 0:
            raise ValueError(f"field index must be non-negative, got {self.field}")

    def scaled(self, c: float) -> "LinearTerm":
        coeff = self.coeff
        if callable(coeff):
            return LinearTerm(self.field, self.order, lambda p, f=coeff: c * f(p))
        return LinearTerm(self.field, self.order, c * coeff)


@dataclass(frozen=True)
class LinearConstraint:
    terms: tuple
    rhs: Scalar
    points: CollocationSet
    label: str

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if not self.terms:
            raise ConstraintError(f"constraint {self.label!r} has no terms")
        d = self.points.points.shape[1]
        for term in self.terms:
            if len(term.order) != d:
                raise ConstraintError(
                    f"constraint {self.label!r}: order {term.order.orders} does not match point dimension {d}"
                )

    @property
    def dim(self) -> int:
        return self.points.points.shape[1]

    @property
    def n_rows(self) -> int:
        return len(self.points)

    def scaled(self, c: float) -> "LinearConstraint":
        rhs = self.rhs
        rhs = (lambda p, f=rhs: c * f(p)) if callable(rhs) else c * rhs
        return LinearConstraint(tuple(t.scaled(c) for t in self.terms), rhs, self.points, self.label)

    def with_points(self, points: CollocationSet) -> "LinearConstraint":
        return LinearConstraint(self.terms, self.rhs, points, self.label)


@dataclass(frozen=True, eq=False)
class DesignSystem:
    matrix: np.ndarray
    rhs: np.ndarray
    row_labels: np.ndarray
    n_fields: int
    n_neurons: int
    label_order: tuple = field(default=())

    def block(self, j: int) -> slice:
        """Columns owned by field ``j``."""
        return slice(j * self.n_neurons, (j + 1) * self.n_neurons)

    @property
    def shape(self):
        return self.matrix.shape


def _check_finite(values, what, label):
    bad = ~np.isfinite(values)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise ConstraintError(f"constraint {label!r}: non-finite {what} at point index {i}")


def assemble_block(basis: ElmBasis, constraint: LinearConstraint, n_fields: int):
    """Rows and right-hand side for every point of ``constraint``."""
    pts = constraint.points.points
    M = basis.n_neurons
    if constraint.dim != basis.input_dim:
        raise ConstraintError(
            f"constraint {constraint.label!r} has dimension {constraint.dim}, basis has {basis.input_dim}"
        )
    rows = np.zeros((len(pts), n_fields * M))
    for term in constraint.terms:
        if term.field >= n_fields:
            raise ConstraintError(f"constraint {constraint.label!r} references field {term.field} of {n_fields}")
        c = _evaluate(term.coeff, pts)
        _check_finite(c, "coefficient", constraint.label)
        rows[:, term.field * M:(term.field + 1) * M] += c[:, None] * eval_feature_derivs(basis, pts, term.order)
    rhs = _evaluate(constraint.rhs, pts).copy()
    _check_finite(rhs, "right-hand side", constraint.label)
    return rows, rhs


def assemble_row(basis: ElmBasis, constraint: LinearConstraint, point, n_fields: int):
    """Single row ``(row, rhs_value)`` of ``constraint`` at ``point``."""
    single = constraint.with_points(CollocationSet(np.atleast_2d(point), constraint.points.label))
    rows, rhs = assemble_block(basis, single, n_fields)
    return rows[0], float(rhs[0])


def infer_field_count(constraints: Sequence[LinearConstraint]) -> int:
    return 1 + max(t.field for c in constraints for t in c.terms)


def assemble_system(basis, constraints, n_fields=None, row_scale=None) -> DesignSystem:
    """Stack every constraint (roster order, then point order).

    ``row_scale`` optionally maps a label, or a label prefix ending in '.',
    to a multiplier applied to that constraint's rows and right-hand side.
    """
    constraints = list(constraints)
    if not constraints:
        raise ConstraintError("cannot assemble an empty constraint roster")
    dims = {c.dim for c in constraints}
    if len(dims) != 1:
        raise ConstraintError(f"constraints mix point dimensions {sorted(dims)}")
    if n_fields is None:
        n_fields = infer_field_count(constraints)
    blocks, rhss, labels = [], [], []
    for c in constraints:
        rows, rhs = assemble_block(basis, c, n_fields)
        w = _row_weight(c.label, row_scale)
        if w != 1.0:
            rows *= w
            rhs *= w
        blocks.append(rows)
        rhss.append(rhs)
        labels.extend([c.label] * len(rhs))
    order = tuple(dict.fromkeys(c.label for c in constraints))
    return DesignSystem(
        np.vstack(blocks), np.concatenate(rhss), np.array(labels), n_fields, basis.n_neurons, order
    )


def _row_weight(label, row_scale):
    if not row_scale:
        return 1.0
    if label in row_scale:
        return float(row_scale[label])
    for key, w in row_scale.items():
        if key.endswith(".") and label.startswith(key):
            return float(w)
    return 1.0


@dataclass(frozen=True)
class Residual:
    vector: np.ndarray
    norm: float
    by_label: dict
    counts: dict


def residual(system: DesignSystem, theta) -> Residual:
    """``A @ theta - r`` with its norm overall and per row label."""
    theta = np.asarray(theta, dtype=np.float64)
    if theta.shape != (system.matrix.shape[1],):
        raise ValueError(f"theta has shape {theta.shape}, expected ({system.matrix.shape[1]},)")
    vec = system.matrix @ theta - system.rhs
    by_label, counts = {}, {}
    for label in system.label_order or tuple(dict.fromkeys(system.row_labels)):
        mask = system.row_labels == label
        by_label[label] = float(np.linalg.norm(vec[mask]))
        counts[label] = int(mask.sum())
    return Residual(vec, float(np.linalg.norm(vec)), by_label, counts)


def apply_to_fields(constraint: LinearConstraint, fields, points=None) -> np.ndarray:
    """Evaluate the constraint's left-hand side on callable fields.

    ``fields[j](points, order)`` must return D^order u_j at each point.
    Returns ``lhs - rhs`` per point.
    """
    pts = constraint.points.points if points is None else np.atleast_2d(points)
    lhs = np.zeros(len(pts))
    for term in constraint.terms:
        lhs += _evaluate(term.coeff, pts) * np.asarray(fields[term.field](pts, term.order), dtype=np.float64)
    return lhs - _evaluate(constraint.rhs, pts)
