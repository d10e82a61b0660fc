"""Irregular planar domains, their boundary curves, and boundary node placement.

A :class:`Domain` is described by a set of inequality constraints (each given as
a signed-distance estimate that is ``<= 0`` inside), a list of closed
parametrized boundary curves, and optional sharp-corner markers. The catalog
covers the test domains used by the experiment presets.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, optimize

BOUNDARY_TOL = 1e-12

Constraint = Callable[[np.ndarray], np.ndarray]


class GeometryError(ValueError):
    pass


class Region(enum.IntEnum):
    EXTERIOR = -1
    BOUNDARY = 0
    INTERIOR = 1

    def __str__(self) -> str:
        return self.name.lower()


def as_points(points) -> np.ndarray:
    """Coerce a point or a sequence of points into a float array of shape (k, 2)."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(1, 2)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError(f"expected points of shape (k, 2), got {pts.shape}")
    return pts


@dataclass(frozen=True, eq=False)
class BoundaryCurve:
    """Closed curve ``t in [0, 1) -> (x, y)`` with arc-length density ``speed``.

    ``param`` and ``speed`` must accept scalars as well as 1-D arrays.
    ``arclength_param`` marks curves whose parameter is already proportional
    to arc length (polygons), which skips the numerical inversion.
    """

    param: Callable[[np.ndarray], np.ndarray]
    speed: Callable[[np.ndarray], np.ndarray]
    orientation: str = "outer"
    arclength_param: bool = False
    panels: int = 64

    def __post_init__(self):
        if self.orientation not in ("outer", "inner-hole"):
            raise ValueError(f"orientation must be 'outer' or 'inner-hole', got {self.orientation!r}")

    def points(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return np.asarray(self.param(t), dtype=float).reshape(-1, 2)

    def _quad(self, a: float, b: float) -> float:
        if b <= a:
            return 0.0
        with warnings.catch_warnings():
            warnings.simplefilter("error", integrate.IntegrationWarning)
            try:
                val, _ = integrate.quad(self.speed, a, b, epsabs=1e-15, epsrel=1e-13, limit=200)
            except integrate.IntegrationWarning as exc:
                raise GeometryError(f"arc-length quadrature did not converge on [{a}, {b}]: {exc}") from exc
        if not math.isfinite(val):
            raise GeometryError("arc-length quadrature returned a non-finite value")
        return float(val)

    @cached_property
    def _cumulative(self) -> tuple[np.ndarray, np.ndarray]:
        if self.arclength_param:
            t = np.array([0.0, 1.0])
            return t, t * float(self.speed(0.0))
        t = np.linspace(0.0, 1.0, self.panels + 1)
        pieces = [self._quad(t[i], t[i + 1]) for i in range(self.panels)]
        return t, np.concatenate([[0.0], np.cumsum(pieces)])

    @property
    def length(self) -> float:
        return float(self._cumulative[1][-1])

    def arclength(self, t) -> np.ndarray:
        """Arc length from ``t=0`` to each ``t`` in ``[0, 1]``."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if self.arclength_param:
            return t * self.length
        knots, cum = self._cumulative
        idx = np.clip(np.searchsorted(knots, t, side="right") - 1, 0, self.panels - 1)
        return np.array([cum[i] + self._quad(knots[i], ti) for i, ti in zip(idx, t)])

    def t_at_arclength(self, s) -> np.ndarray:
        """Invert :meth:`arclength`; ``s`` is taken modulo the curve length."""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        L = self.length
        s = np.mod(s, L)
        if self.arclength_param:
            return s / L
        knots, cum = self._cumulative
        out = np.empty_like(s)
        for k, target in enumerate(s):
            i = int(np.clip(np.searchsorted(cum, target, side="right") - 1, 0, self.panels - 1))
            if target == cum[i]:
                out[k] = knots[i]
                continue
            lo, hi = knots[i], knots[i + 1]
            out[k] = optimize.brentq(
                lambda t: cum[i] + self._quad(lo, t) - target, lo, hi, xtol=1e-16, rtol=4 * np.finfo(float).eps
            )
        return out


@dataclass(frozen=True, eq=False)
class Domain:
    """Compact planar domain.

    ``constraints`` return signed-distance estimates (negative inside); a point
    is interior when every estimate is below ``-tol``, exterior when any is
    above ``tol`` and on the boundary otherwise.
    """

    name: str
    constraints: tuple[Constraint, ...]
    curves: tuple[BoundaryCurve, ...]
    bbox: tuple[float, float, float, float]
    corners: tuple[tuple[int, float], ...] = ()
    tol: float = BOUNDARY_TOL

    def signed_distance(self, points) -> np.ndarray:
        pts = as_points(points)
        return np.max(np.stack([np.asarray(c(pts), dtype=float) for c in self.constraints]), axis=0)

    def classify(self, points) -> np.ndarray:
        d = self.signed_distance(points)
        out = np.full(d.shape, int(Region.BOUNDARY), dtype=int)
        out[d < -self.tol] = int(Region.INTERIOR)
        out[d > self.tol] = int(Region.EXTERIOR)
        return out

    def contains(self, p) -> Region:
        return Region(int(self.classify(p)[0]))

    def boundary_residual(self, points) -> np.ndarray:
        """Distance-like residual of the nearest boundary equation."""
        pts = as_points(points)
        return np.min(np.abs(np.stack([np.asarray(c(pts), dtype=float) for c in self.constraints])), axis=0)

    @property
    def perimeter(self) -> float:
        return sum(c.length for c in self.curves)


# -- constraint builders -----------------------------------------------------


def _halfplane(p0, p1) -> Constraint:
    """Edge p0 -> p1 of a counter-clockwise polygon; positive outside."""
    (x0, y0), (x1, y1) = p0, p1
    dx, dy = x1 - x0, y1 - y0
    h = math.hypot(dx, dy)
    nx, ny = dy / h, -dx / h

    def g(pts):
        return nx * (pts[:, 0] - x0) + ny * (pts[:, 1] - y0)

    return g


def _implicit(g: Callable, grad: Callable) -> Constraint:
    def d(pts):
        x, y = pts[:, 0], pts[:, 1]
        val = g(x, y)
        gx, gy = grad(x, y)
        norm = np.hypot(gx, gy)
        with np.errstate(divide="ignore", invalid="ignore"):
            est = np.where(norm > 0, val / np.where(norm > 0, norm, 1.0), val)
        return est

    return d


# -- domain constructors -----------------------------------------------------


def polygon(name: str, vertices: Sequence[Sequence[float]], corners: bool = False) -> Domain:
    """Convex polygon. Vertex order is normalised to counter-clockwise."""
    v = np.asarray(vertices, dtype=float)
    area2 = np.sum(v[:, 0] * np.roll(v[:, 1], -1) - np.roll(v[:, 0], -1) * v[:, 1])
    if area2 < 0:
        v = v[::-1]
    closed = np.vstack([v, v[:1]])
    edges = np.diff(closed, axis=0)
    lengths = np.hypot(edges[:, 0], edges[:, 1])
    cum = np.concatenate([[0.0], np.cumsum(lengths)])
    L = float(cum[-1])

    def param(t):
        t = np.asarray(t, dtype=float)
        s = np.mod(t, 1.0) * L
        i = np.clip(np.searchsorted(cum, s, side="right") - 1, 0, len(lengths) - 1)
        frac = (s - cum[i]) / lengths[i]
        return closed[i] + frac[..., None] * edges[i]

    def speed(t):
        return np.full(np.shape(t), L) if np.ndim(t) else L

    curve = BoundaryCurve(param, speed, "outer", arclength_param=True)
    cons = tuple(_halfplane(closed[i], closed[i + 1]) for i in range(len(v)))
    bbox = (v[:, 0].min(), v[:, 0].max(), v[:, 1].min(), v[:, 1].max())
    corner_list = tuple((0, float(cum[i] / L)) for i in range(len(v))) if corners else ()
    return Domain(name, cons, (curve,), tuple(map(float, bbox)), corner_list)


def _ellipse_curve(a: float, b: float, cx: float = 0.0, cy: float = 0.0, orientation: str = "outer"):
    two_pi = 2 * np.pi

    def param(t):
        th = two_pi * np.asarray(t, dtype=float)
        return np.stack([cx + a * np.cos(th), cy + b * np.sin(th)], axis=-1)

    def speed(t):
        th = two_pi * np.asarray(t, dtype=float)
        return two_pi * np.hypot(a * np.sin(th), b * np.cos(th))

    return BoundaryCurve(param, speed, orientation)


def ellipse(a: float = 0.6, b: float = 0.9, name: str = "ellipse") -> Domain:
    """Axis-aligned ellipse ``x^2/a^2 + y^2/b^2 <= 1``."""
    cons = _implicit(
        lambda x, y: x**2 / a**2 + y**2 / b**2 - 1.0,
        lambda x, y: (2 * x / a**2, 2 * y / b**2),
    )
    return Domain(name, (cons,), (_ellipse_curve(a, b),), (-a, a, -b, b))


def lune() -> Domain:
    # the excluded disk touches the outer circle at (0.9, 0)
    outer = _implicit(
        lambda x, y: x**2 / 0.9**2 + y**2 / 0.9**2 - 1.0,
        lambda x, y: (2 * x / 0.9**2, 2 * y / 0.9**2),
    )
    inner = _implicit(
        lambda x, y: 1.0 - (x - 0.3) ** 2 / 0.6**2 - y**2 / 0.6**2,
        lambda x, y: (-2 * (x - 0.3) / 0.6**2, -2 * y / 0.6**2),
    )
    curves = (_ellipse_curve(0.9, 0.9), _ellipse_curve(0.6, 0.6, cx=0.3, orientation="inner-hole"))
    return Domain("lune", (outer, inner), curves, (-0.9, 0.9, -0.9, 0.9), corners=((0, 0.0),))


def _polar_curve(r0: float, amp: float, k: int, orientation: str) -> BoundaryCurve:
    two_pi = 2 * np.pi

    def param(t):
        th = two_pi * np.asarray(t, dtype=float)
        r = r0 + amp * np.sin(k * th)
        return np.stack([r * np.cos(th), r * np.sin(th)], axis=-1)

    def speed(t):
        th = two_pi * np.asarray(t, dtype=float)
        return two_pi * np.hypot(r0 + amp * np.sin(k * th), amp * k * np.cos(k * th))

    return BoundaryCurve(param, speed, orientation)


def _polar_constraint(r0: float, amp: float, k: int, sign: float) -> Constraint:
    # sign=+1: r <= rho(theta); sign=-1: r >= rho(theta)
    def d(pts):
        x, y = pts[:, 0], pts[:, 1]
        r = np.hypot(x, y)
        th = np.arctan2(y, x)
        rho = r0 + amp * np.sin(k * th)
        drho = amp * k * np.cos(k * th)
        with np.errstate(over="ignore"):
            grad = np.sqrt(1.0 + (drho / np.maximum(r, 1e-300)) ** 2)
        return sign * (r - rho) / grad

    return d


def five_petal_annulus() -> Domain:
    cons = (_polar_constraint(0.7, 0.2, 5, 1.0), _polar_constraint(0.4, 0.2, 5, -1.0))
    curves = (_polar_curve(0.7, 0.2, 5, "outer"), _polar_curve(0.4, 0.2, 5, "inner-hole"))
    return Domain("five_petal_annulus", cons, curves, (-0.9, 0.9, -0.9, 0.9))


def bowtie() -> Domain:
    """``4x^2 - 4x^4/0.81 - y^2 >= 0``, pinched at the origin.

    The boundary is the figure-eight ``(0.9 sin(2 pi t), 0.9 sin(4 pi t))``,
    which passes through the origin at ``t = 0`` and ``t = 1/2``.
    """
    c = 0.9**2
    cons = _implicit(
        lambda x, y: y**2 - 4 * x**2 + 4 * x**4 / c,
        lambda x, y: (-8 * x + 16 * x**3 / c, 2 * y),
    )
    two_pi = 2 * np.pi

    def param(t):
        t = np.asarray(t, dtype=float)
        return np.stack([0.9 * np.sin(two_pi * t), 0.9 * np.sin(2 * two_pi * t)], axis=-1)

    def speed(t):
        t = np.asarray(t, dtype=float)
        return 0.9 * two_pi * np.hypot(np.cos(two_pi * t), 2 * np.cos(2 * two_pi * t))

    curve = BoundaryCurve(param, speed, "outer")
    return Domain("bowtie", (cons,), (curve,), (-0.9, 0.9, -0.9, 0.9), corners=((0, 0.0), (0, 0.5)))


_CATALOG: dict[str, Callable[[], Domain]] = {
    "diamond": lambda: polygon("diamond", [(1, 0), (0, 1), (-1, 0), (0, -1)], corners=True),
    "pentagon": lambda: polygon(
        "pentagon", [(0, 0.9), (-0.9, 0.2), (-0.7, -0.8), (0.7, -0.8), (0.9, 0.2)], corners=True
    ),
    "triangle": lambda: polygon("triangle", [(0, 0.9), (-0.6, -0.9), (0.6, -0.9)], corners=True),
    "lune": lune,
    "ellipse": ellipse,
    "square": lambda: polygon("square", [(-1, -1), (1, -1), (1, 1), (-1, 1)], corners=True),
    "five_petal_annulus": five_petal_annulus,
    "bowtie": bowtie,
}

DOMAIN_NAMES = tuple(_CATALOG)


def catalog(name: str) -> Domain:
    try:
        factory = _CATALOG[name]
    except KeyError:
        raise GeometryError(f"unknown domain {name!r}; valid identifiers: {', '.join(DOMAIN_NAMES)}") from None
    return factory()


# -- boundary nodes ------------------------------------------------------------


def allocate(weights: Sequence[float], total: int) -> list[int]:
    """Split ``total`` proportionally to ``weights`` (largest-remainder rounding)."""
    w = np.asarray(weights, dtype=float)
    exact = total * w / w.sum()
    counts = np.floor(exact).astype(int)
    rem = total - counts.sum()
    order = np.argsort(-(exact - counts), kind="stable")
    counts[order[:rem]] += 1
    # each curve needs at least one node
    for i in np.flatnonzero(counts == 0):
        j = int(np.argmax(counts))
        counts[j] -= 1
        counts[i] += 1
    return counts.tolist()


SPACINGS = ("arclength", "parameter")


def boundary_nodes(domain: Domain, n_total: int, spacing: str = "arclength") -> np.ndarray:
    """``n_total`` points equispaced in arc length, split across the curves.

    Each curve starts at its ``t = 0`` point. ``spacing="parameter"`` places
    the points equispaced in the curve parameter instead, which clusters them
    where the parametrization is slow.
    """
    if spacing not in SPACINGS:
        raise GeometryError(f"unknown boundary spacing {spacing!r}; expected one of {SPACINGS}")
    if n_total < len(domain.curves):
        raise GeometryError(f"need at least {len(domain.curves)} boundary nodes, got {n_total}")
    lengths = [c.length for c in domain.curves]
    out = []
    for curve, count in zip(domain.curves, allocate(lengths, n_total)):
        if count == 0:
            continue
        u = np.arange(count) / count
        t = u if spacing == "parameter" else curve.t_at_arclength(curve.length * u)
        out.append(curve.points(t))
    return np.vstack(out) if out else np.empty((0, 2))


def corner_refine(nodes, domain: Domain, extra_per_corner: int, radius: float, ratio: float = 0.5) -> np.ndarray:
    """Append boundary points graded geometrically toward each flagged corner.

    For every corner ``extra_per_corner`` points are placed on each side of the
    corner along its curve, at arc distances ``radius * ratio**k``,
    ``k = 1..extra_per_corner``. Points closer than 1e-12 to an existing node
    are dropped.
    """
    if extra_per_corner < 0:
        raise ValueError("extra_per_corner must be non-negative")
    base = as_points(nodes) if len(nodes) else np.empty((0, 2))
    if extra_per_corner == 0 or not domain.corners:
        return base.copy()
    offsets = radius * ratio ** np.arange(1, extra_per_corner + 1)
    candidates = []
    for ci, tc in domain.corners:
        curve = domain.curves[ci]
        s0 = float(curve.arclength(tc)[0])
        for sign in (1.0, -1.0):
            candidates.append(curve.points(curve.t_at_arclength(s0 + sign * offsets)))
    kept = list(base)
    for p in np.vstack(candidates):
        if kept and np.min(np.hypot(*(np.asarray(kept) - p).T)) < 1e-12:
            continue
        kept.append(p)
    return np.asarray(kept).reshape(-1, 2)
