"""Space-time domains split by a prescribed interface x = s(y, t).

Coordinates are always ordered (x, t) in 1D and (x, y, t) in 2D.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .basis import make_rng

PHASE1 = "phase1"
PHASE2 = "phase2"
INTERFACE = "interface"
REGIONS = (PHASE1, PHASE2)

FACES = ("x_lo", "x_hi", "y_lo", "y_hi")

# relative tie tolerance for interface membership
INTERFACE_EPS = 1e-12
# keeps slab-mapped samples off the interface itself
_RHO_MARGIN = 1e-9


def _interval(r, name):
    lo, hi = map(float, r)
    if not lo < hi:
        raise ValueError(f"{name} must satisfy lo < hi, got ({lo}, {hi})")
    return (lo, hi)


@dataclass(frozen=True)
class SpaceTimeDomain:
    x_range: tuple
    t_range: tuple
    y_range: Optional[tuple] = None

    def __post_init__(self):
        object.__setattr__(self, "x_range", _interval(self.x_range, "x_range"))
        object.__setattr__(self, "t_range", _interval(self.t_range, "t_range"))
        if self.y_range is not None:
            object.__setattr__(self, "y_range", _interval(self.y_range, "y_range"))

    @property
    def spatial_dim(self) -> int:
        return 1 if self.y_range is None else 2

    @property
    def dim(self) -> int:
        return self.spatial_dim + 1

    @property
    def eps(self) -> float:
        return INTERFACE_EPS * (self.x_range[1] - self.x_range[0])

    def bounding_box(self):
        ranges = [self.x_range] + ([self.y_range] if self.y_range else []) + [self.t_range]
        return np.array([r[0] for r in ranges]), np.array([r[1] for r in ranges])

    def contains(self, points, tol=1e-12) -> np.ndarray:
        lo, hi = self.bounding_box()
        p = np.atleast_2d(points)
        return np.all((p >= lo - tol) & (p <= hi + tol), axis=1)

    def split(self, points):
        """Return (x, y, t) columns of an (n, d) array; y is None in 1D."""
        p = np.atleast_2d(np.asarray(points, dtype=np.float64))
        if p.shape[1] != self.dim:
            raise ValueError(f"expected {self.dim} coordinates, got {p.shape[1]}")
        y = p[:, 1] if self.spatial_dim == 2 else None
        return p[:, 0], y, p[:, -1]

    def join(self, x, y, t) -> np.ndarray:
        cols = [x] + ([y] if self.spatial_dim == 2 else []) + [t]
        return np.column_stack(np.broadcast_arrays(*cols)).astype(np.float64)


def _zero(y, t):
    return np.zeros_like(np.asarray(t, dtype=np.float64))


@dataclass(frozen=True, eq=False)
class MovingBoundary:
    """Known interface position s(y, t) with its partial derivatives.

    Callables take ``(y, t)`` arrays and must broadcast; ``y`` is None for
    1D problems.  Construction checks on a dense grid that s stays strictly
    inside the x-range.
    """

    domain: SpaceTimeDomain
    position: Callable
    d_dt: Callable = _zero
    d_dy: Callable = _zero
    n_check: int = 257

    def __post_init__(self):
        t = np.linspace(*self.domain.t_range, self.n_check)
        if self.domain.spatial_dim == 2:
            yy, tt = np.meshgrid(np.linspace(*self.domain.y_range, self.n_check), t)
            s = self.position(yy.ravel(), tt.ravel())
        else:
            s = self.position(None, t)
        s = np.asarray(s, dtype=np.float64)
        x_lo, x_hi = self.domain.x_range
        if not np.all(np.isfinite(s)) or s.min() <= x_lo or s.max() >= x_hi:
            raise ValueError(
                f"interface leaves the open x-range ({x_lo}, {x_hi}): "
                f"s in [{np.nanmin(s)}, {np.nanmax(s)}]"
            )

    @property
    def s0(self):
        """Initial interface position as a function of y (a float in 1D)."""
        t0 = self.domain.t_range[0]
        if self.domain.spatial_dim == 1:
            return float(self.position(None, t0))
        return lambda y: self.position(y, t0)

    def at(self, y, t) -> np.ndarray:
        return np.asarray(self.position(y, t), dtype=np.float64)

    def at_points(self, points) -> np.ndarray:
        _, y, t = self.domain.split(points)
        return np.broadcast_to(self.at(y, t), t.shape).astype(np.float64)


def interface_position(boundary: MovingBoundary, y, t) -> float:
    """s(y, t) for a single argument pair, range-checked."""
    dom = boundary.domain
    lo, hi = dom.t_range
    if not lo <= t <= hi:
        raise ValueError(f"t={t} outside {dom.t_range}")
    if dom.spatial_dim == 2:
        if y is None or not dom.y_range[0] <= y <= dom.y_range[1]:
            raise ValueError(f"y={y} outside {dom.y_range}")
    elif y is not None:
        raise ValueError("1D boundary takes no y coordinate")
    return float(boundary.position(y, t))


def classify(boundary: MovingBoundary, point):
    """Region tag of one point, or an array of tags for an (n, d) batch."""
    p = np.asarray(point, dtype=np.float64)
    single = p.ndim == 1
    x = np.atleast_2d(p)[:, 0]
    s = boundary.at_points(p)
    eps = boundary.domain.eps
    tags = np.where(x < s - eps, PHASE1, np.where(x > s + eps, PHASE2, INTERFACE))
    return str(tags[0]) if single else tags


@dataclass(frozen=True, eq=False)
class CollocationSet:
    points: np.ndarray
    label: str

    def __post_init__(self):
        p = np.array(self.points, dtype=np.float64)
        if p.ndim != 2 or len(p) == 0:
            raise ValueError(f"collocation set {self.label!r} needs a non-empty (n, d) array")
        p.setflags(write=False)
        object.__setattr__(self, "points", p)

    def __len__(self):
        return len(self.points)


def unit_samples(n: int, k: int, seed: int, stream: int, strategy: str = "random") -> np.ndarray:
    """``n`` points in [0, 1)^k.

    ``random`` draws rows from a Philox stream, so the first n rows do not
    depend on the total requested.  ``grid`` takes n evenly spaced nodes of
    the smallest midpoint tensor grid holding at least n nodes.
    """
    if n < 1:
        raise ValueError(f"sample count must be positive, got {n}")
    if strategy == "random":
        return make_rng(seed, stream).random((n, k))
    if strategy == "grid":
        m = int(np.ceil(n ** (1.0 / k) - 1e-9))
        while m**k < n:
            m += 1
        axes = [(np.arange(m) + 0.5) / m] * k
        full = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, k)
        idx = np.round(np.linspace(0, len(full) - 1, n)).astype(int)
        return full[idx]
    raise ValueError(f"unknown sampling strategy {strategy!r}")


def _slab(boundary, region, y, t, rho):
    """Map rho in [0, 1) into the region's x-slab at (y, t)."""
    x_lo, x_hi = boundary.domain.x_range
    s = boundary.at(y, t)
    rho = _RHO_MARGIN + (1.0 - 2.0 * _RHO_MARGIN) * rho
    if region == PHASE1:
        width = s - x_lo
        x = x_lo + rho * width
    elif region == PHASE2:
        width = x_hi - s
        x = s + rho * width
    else:
        raise ValueError(f"region must be {PHASE1!r} or {PHASE2!r}, got {region!r}")
    if np.any(width <= boundary.domain.eps):
        raise ValueError(f"empty {region} slab: interface touches the domain edge")
    return x


def _scale(u, r):
    return r[0] + (r[1] - r[0]) * u


def sample_phase_interior(domain, boundary, region, n, seed, *, stream=1, strategy="random", label=None):
    u = unit_samples(n, domain.dim, seed, stream, strategy)
    t = _scale(u[:, -1], domain.t_range)
    y = _scale(u[:, 1], domain.y_range) if domain.spatial_dim == 2 else None
    x = _slab(boundary, region, y, t, u[:, 0])
    return CollocationSet(domain.join(x, y, t), label or f"pde.{region}")


def sample_time_slice(domain, boundary, region, t_star, n, seed, *, stream=2, strategy="random", label=None):
    if not domain.t_range[0] <= t_star <= domain.t_range[1]:
        raise ValueError(f"t_star={t_star} outside {domain.t_range}")
    u = unit_samples(n, domain.spatial_dim, seed, stream, strategy)
    t = np.full(n, float(t_star))
    y = _scale(u[:, 1], domain.y_range) if domain.spatial_dim == 2 else None
    x = _slab(boundary, region, y, t, u[:, 0])
    return CollocationSet(domain.join(x, y, t), label or f"slice.{region}")


def sample_interface(domain, boundary, n, seed, *, stream=3, strategy="random", label="interface"):
    u = unit_samples(n, domain.spatial_dim, seed, stream, strategy)
    t = _scale(u[:, -1], domain.t_range)
    y = _scale(u[:, 0], domain.y_range) if domain.spatial_dim == 2 else None
    x = np.broadcast_to(boundary.at(y, t), t.shape)
    return CollocationSet(domain.join(x, y, t), label)


def sample_fixed_boundary(domain, boundary, face, n, seed, *, region=None, stream=4, strategy="random", label=None):
    """Points on a fixed face.

    x-faces keep (y, t) uniform.  y-faces need ``region`` and put x in that
    phase's slab along the face, so each phase gets its own sub-set.
    """
    if face not in FACES or (face.startswith("y") and domain.spatial_dim == 1):
        raise ValueError(f"face {face!r} not present in a {domain.spatial_dim}D domain")
    label = label or f"face.{face}" + (f".{region}" if region else "")
    if face.startswith("x"):
        x_val = domain.x_range[0] if face == "x_lo" else domain.x_range[1]
        u = unit_samples(n, domain.spatial_dim, seed, stream, strategy)
        t = _scale(u[:, -1], domain.t_range)
        y = _scale(u[:, 0], domain.y_range) if domain.spatial_dim == 2 else None
        return CollocationSet(domain.join(np.full(n, x_val), y, t), label)
    if region is None:
        raise ValueError("y-faces are split by phase; pass region")
    y_val = domain.y_range[0] if face == "y_lo" else domain.y_range[1]
    u = unit_samples(n, 2, seed, stream, strategy)
    t = _scale(u[:, 1], domain.t_range)
    y = np.full(n, y_val)
    x = _slab(boundary, region, y, t, u[:, 0])
    return CollocationSet(domain.join(x, y, t), label)
