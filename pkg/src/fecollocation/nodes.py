"""Collocation node sets: equispaced grids restricted to a domain, random
interior samples, and oversampling bookkeeping."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .frames import FrameSpec
from .geometry import Domain, Region, as_points

RANDOM_GENERATOR = "numpy.PCG64"


class UndersampledError(ValueError):
    pass


def even_count(value: float) -> int:
    """Smallest even integer >= ``value`` (and >= 2)."""
    m = max(2, math.ceil(round(value, 9)))
    return m + (m % 2)


@dataclass(frozen=True)
class GridSpec:
    Mx: int
    My: int
    T: float = 2.0
    gamma: float | None = None

    def __post_init__(self):
        for m in (self.Mx, self.My):
            if m < 2 or m % 2:
                raise ValueError(f"grid counts must be even and >= 2, got Mx={self.Mx}, My={self.My}")

    @classmethod
    def for_frame(cls, N: int, gamma: float = 4.0, T: float = 2.0, x_density: float = 1.0) -> "GridSpec":
        """``M = gamma*N`` per axis; ``x_density > 1`` refines only the x-axis."""
        M = even_count(gamma * N)
        return cls(even_count(M * x_density), M, T, gamma)

    @property
    def count(self) -> int:
        return self.Mx * self.My

    def refined(self, factor: int) -> "GridSpec":
        return GridSpec(self.Mx * factor, self.My * factor, self.T, self.gamma)

    def as_dict(self) -> dict:
        return {"M_x": self.Mx, "M_y": self.My, "gamma": self.gamma, "T": self.T}


def tensor_grid(g: GridSpec) -> np.ndarray:
    """Points ``(2T k1/Mx, 2T k2/My)`` with ``k in {-M/2, ..., M/2-1}``."""
    x = 2 * g.T * np.arange(-g.Mx // 2, g.Mx // 2) / g.Mx
    y = 2 * g.T * np.arange(-g.My // 2, g.My // 2) / g.My
    X, Y = np.meshgrid(x, y, indexing="ij")
    return np.column_stack([X.ravel(), Y.ravel()])


def restrict_interior(grid, domain: Domain) -> np.ndarray:
    """Keep strictly interior points; grid points on the boundary are dropped."""
    if len(grid) == 0:
        return np.empty((0, 2))
    pts = as_points(grid)
    return pts[domain.classify(pts) == Region.INTERIOR]


def random_interior(domain: Domain, count: int, seed: int) -> np.ndarray:
    """``count`` i.i.d. uniform interior points by rejection from the bounding box."""
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    x0, x1, y0, y1 = domain.bbox
    accepted: list[np.ndarray] = []
    have = trials = 0
    while have < count:
        batch = max(1024, 2 * (count - have))
        pts = np.column_stack([rng.uniform(x0, x1, batch), rng.uniform(y0, y1, batch)])
        inside = pts[domain.classify(pts) == Region.INTERIOR]
        accepted.append(inside)
        have += len(inside)
        trials += batch
        if trials >= 1_000_000 and have < 1e-4 * trials:
            raise ValueError(f"rejection sampling on {domain.name!r} accepted {have} of {trials} draws")
    return np.vstack(accepted)[:count]


@dataclass(frozen=True, eq=False)
class NodeSet:
    interior: np.ndarray
    boundary: np.ndarray = field(default_factory=lambda: np.empty((0, 2)))
    grid: GridSpec | None = None
    seed: int | None = None
    context: str = "pde"

    @property
    def n_interior(self) -> int:
        return len(self.interior)

    @property
    def n_boundary(self) -> int:
        return len(self.boundary)

    @property
    def n_omega(self) -> int:
        if self.context == "approx":
            return self.n_interior
        return self.n_interior + self.n_boundary

    @property
    def points(self) -> np.ndarray:
        return np.vstack([self.interior, self.boundary])

    def check_oversampling(self, spec: FrameSpec) -> None:
        total = self.n_interior + self.n_boundary
        if total <= spec.size:
            raise UndersampledError(
                f"undersampled: N_I + N_B = {self.n_interior} + {self.n_boundary} = {total} "
                f"<= N_Lambda = {spec.size} (N = {spec.N})"
            )

    def metadata(self) -> dict:
        meta = {
            "N_I": self.n_interior,
            "N_B": self.n_boundary,
            "N_Omega": self.n_omega,
            "context": self.context,
        }
        if self.grid is not None:
            meta.update(self.grid.as_dict())
        if self.seed is not None:
            meta.update(seed=self.seed, generator=RANDOM_GENERATOR)
        return meta


def grid_nodes(domain: Domain, grid: GridSpec, boundary=None, context: str = "pde") -> NodeSet:
    x0, x1, y0, y1 = domain.bbox
    if max(abs(x0), abs(x1), abs(y0), abs(y1)) >= grid.T:
        raise ValueError(f"domain {domain.name!r} is not strictly inside [-{grid.T}, {grid.T}]^2")
    interior = restrict_interior(tensor_grid(grid), domain)
    bnd = np.empty((0, 2)) if boundary is None else as_points(boundary)
    return NodeSet(interior, bnd, grid=grid, context=context)


def oversampling_report(ns: NodeSet, spec: FrameSpec) -> dict:
    n_lambda = spec.size
    return {
        "N_I": ns.n_interior,
        "N_B": ns.n_boundary,
        "N_Lambda": n_lambda,
        "interior_ratio": ns.n_interior / n_lambda,
        "total_ratio": (ns.n_interior + ns.n_boundary) / n_lambda,
    }
