"""Random tanh feature map of an extreme learning machine.

The hidden layer is drawn once and frozen.  Every feature derivative is
closed form::

    D^a h_m(p) = prod_i w_{m,i}**a_i * tanh^(|a|)(w_m . p + b_m)

with tanh' = 1 - tanh**2 and tanh'' = -2 tanh (1 - tanh**2).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

MAX_ORDER = 2


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Philox4x64-10 generator keyed by ``(seed, stream)``.

    Philox is counter based, so the n-th draw does not depend on the
    platform or on how many values are requested in one call.
    """
    if seed < 0 or stream < 0:
        raise ValueError(f"seed and stream must be non-negative, got {seed}, {stream}")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, stream])))


@dataclass(frozen=True)
class DerivOrder:
    """Multi-index of partial derivative orders, one entry per coordinate."""

    orders: tuple[int, ...]

    def __post_init__(self):
        orders = tuple(int(a) for a in self.orders)
        object.__setattr__(self, "orders", orders)
        if any(a < 0 for a in orders):
            raise ValueError(f"negative derivative order in {orders}")
        if any(a > MAX_ORDER for a in orders) or sum(orders) > MAX_ORDER:
            raise ValueError(f"derivative order {orders} exceeds total order {MAX_ORDER}")

    @property
    def total(self) -> int:
        return sum(self.orders)

    @classmethod
    def zero(cls, dim: int) -> "DerivOrder":
        return cls((0,) * dim)

    @classmethod
    def along(cls, dim: int, axis: int, k: int = 1) -> "DerivOrder":
        orders = [0] * dim
        orders[axis] = k
        return cls(tuple(orders))

    def __len__(self):
        return len(self.orders)


OrderLike = Union[DerivOrder, Sequence[int]]


def as_order(order: OrderLike) -> DerivOrder:
    return order if isinstance(order, DerivOrder) else DerivOrder(tuple(order))


@dataclass(frozen=True, eq=False)
class ElmBasis:
    """Frozen hidden layer: ``weights`` is (M, d), ``biases`` is (M,).

    ``input_shift``/``input_scale`` implement the optional affine input
    normalisation ``p -> (p - shift) * scale``; both default to identity.
    """

    weights: np.ndarray
    biases: np.ndarray
    input_shift: np.ndarray = field(default=None)
    input_scale: np.ndarray = field(default=None)
    activation: str = "tanh"

    def __post_init__(self):
        w = np.array(self.weights, dtype=np.float64)
        b = np.array(self.biases, dtype=np.float64)
        if w.ndim != 2 or b.shape != (w.shape[0],):
            raise ValueError(f"weights {w.shape} and biases {b.shape} are inconsistent")
        if self.activation != "tanh":
            raise ValueError(f"unsupported activation {self.activation!r}")
        d = w.shape[1]
        shift = np.zeros(d) if self.input_shift is None else np.array(self.input_shift, dtype=np.float64)
        scale = np.ones(d) if self.input_scale is None else np.array(self.input_scale, dtype=np.float64)
        if shift.shape != (d,) or scale.shape != (d,):
            raise ValueError("input normalisation must have one entry per coordinate")
        for arr in (w, b, shift, scale):
            arr.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "biases", b)
        object.__setattr__(self, "input_shift", shift)
        object.__setattr__(self, "input_scale", scale)

    @property
    def input_dim(self) -> int:
        return self.weights.shape[1]

    @property
    def n_neurons(self) -> int:
        return self.weights.shape[0]

    def __eq__(self, other):
        if not isinstance(other, ElmBasis):
            return NotImplemented
        return all(
            np.array_equal(a, b)
            for a, b in [
                (self.weights, other.weights),
                (self.biases, other.biases),
                (self.input_shift, other.input_shift),
                (self.input_scale, other.input_scale),
            ]
        )

    __hash__ = None


def init_basis(d: int, M: int, seed: int, interval=(-1.0, 1.0), normalize=None) -> ElmBasis:
    """Draw a basis with weights and biases uniform on ``interval``.

    Weights come first in the Philox stream (row-major, M x d), then the
    M biases.  ``normalize`` is an optional ``(lo, hi)`` pair of length-d
    arrays giving the bounding box mapped affinely onto [-1, 1].
    """
    if d not in (2, 3):
        raise ValueError(f"input dimension must be 2 or 3, got {d}")
    if M < 1:
        raise ValueError(f"neuron count must be positive, got {M}")
    lo, hi = map(float, interval)
    if not (np.isfinite(lo) and np.isfinite(hi)) or lo > hi:
        raise ValueError(f"invalid sampling interval ({lo}, {hi})")
    rng = make_rng(seed, 0)
    u = rng.random(M * d + M)
    vals = lo + (hi - lo) * u
    weights = vals[: M * d].reshape(M, d)
    biases = vals[M * d:]
    shift = scale = None
    if normalize is not None:
        box_lo, box_hi = (np.asarray(v, dtype=np.float64) for v in normalize)
        shift = 0.5 * (box_lo + box_hi)
        scale = 2.0 / (box_hi - box_lo)
    return ElmBasis(weights, biases, shift, scale)


def _as_points(basis: ElmBasis, point) -> tuple[np.ndarray, bool]:
    p = np.asarray(point, dtype=np.float64)
    single = p.ndim == 1
    p = np.atleast_2d(p)
    if p.ndim != 2 or p.shape[1] != basis.input_dim:
        raise ValueError(f"points must have {basis.input_dim} coordinates, got shape {np.shape(point)}")
    return p, single


def _preactivation(basis: ElmBasis, p: np.ndarray) -> np.ndarray:
    q = (p - basis.input_shift) * basis.input_scale
    return q @ basis.weights.T + basis.biases


def eval_features(basis: ElmBasis, point) -> np.ndarray:
    """Hidden-layer outputs; (M,) for one point, (n, M) for an (n, d) batch."""
    p, single = _as_points(basis, point)
    h = np.tanh(_preactivation(basis, p))
    return h[0] if single else h


def eval_feature_derivs(basis: ElmBasis, point, order: OrderLike) -> np.ndarray:
    """Partial derivative ``order`` of every feature at ``point``."""
    order = as_order(order)
    if len(order) != basis.input_dim:
        raise ValueError(f"order {order.orders} does not match input dimension {basis.input_dim}")
    p, single = _as_points(basis, point)
    th = np.tanh(_preactivation(basis, p))
    k = order.total
    if k == 0:
        out = th
    else:
        dsig = 1.0 - th * th
        out = dsig if k == 1 else -2.0 * th * dsig
        # chain rule factor from the affine input map and the weights
        factor = np.ones(basis.n_neurons)
        for i, a in enumerate(order.orders):
            if a:
                factor = factor * (basis.weights[:, i] * basis.input_scale[i]) ** a
        out = out * factor
    return out[0] if single else out
