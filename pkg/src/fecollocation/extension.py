"""Discrete Fourier extension: least-squares fit of a function sampled on
interior collocation nodes, evaluation of the fitted series, and sup-norm
error measurement."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .frames import DerivOrder, FrameSpec, eval_matrix, synthesize
from .geometry import Domain, as_points
from .linalg import TsvdReport, tsvd_solve
from .nodes import GridSpec, NodeSet, UndersampledError, grid_nodes, restrict_interior, tensor_grid

ScalarField = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class Approximant:
    """Fitted Fourier series.

    ``coefficients`` solve the scaled system ``(s * Phi) a = b``, so the
    represented function is ``sum_l s * a_l * phi_l``; ``synthesis_scale`` is
    ``s``. :attr:`fourier_coefficients` gives ``s * a``.
    """

    spec: FrameSpec
    coefficients: np.ndarray
    fit_report: TsvdReport | None = None
    node_meta: dict = field(default_factory=dict)
    synthesis_scale: float = 1.0
    grid: GridSpec | None = None

    def __post_init__(self):
        if self.coefficients.shape != (self.spec.size,):
            raise ValueError(f"expected {self.spec.size} coefficients, got {self.coefficients.shape}")

    @property
    def fourier_coefficients(self) -> np.ndarray:
        return self.synthesis_scale * self.coefficients

    def __call__(self, points, d: DerivOrder | str = DerivOrder.VALUE) -> np.ndarray:
        return evaluate(self, points, d)


def sample(f: ScalarField, points) -> np.ndarray:
    pts = as_points(points)
    vals = np.asarray(f(pts[:, 0], pts[:, 1]), dtype=complex)
    return np.broadcast_to(vals, (len(pts),)).copy()


def fit_points(f: ScalarField, points, spec: FrameSpec, scale: float | None = None, meta: dict | None = None,
               grid: GridSpec | None = None) -> Approximant:
    """Fit on an arbitrary node set. ``scale`` defaults to ``1/sqrt(len(points))``."""
    pts = as_points(points)
    if len(pts) <= spec.size:
        raise UndersampledError(f"undersampled: N_Omega = {len(pts)} <= N_Lambda = {spec.size} (N = {spec.N})")
    if scale is None:
        scale = 1.0 / math.sqrt(len(pts))
    A = eval_matrix(spec, pts, DerivOrder.VALUE, scale)
    a, report = tsvd_solve(A, sample(f, pts), spec.eps)
    return Approximant(spec, a, report, dict(meta or {}, N_Omega=len(pts)), scale, grid)


def fit(f: ScalarField, domain: Domain, spec: FrameSpec, grid: GridSpec | None = None, gamma: float = 4.0) -> Approximant:
    """Discrete Fourier extension of ``f`` from the grid nodes inside ``domain``.

    The system matrix carries the ``1/sqrt(N_R)`` factor (``N_R`` = full grid
    size on the box); the right-hand side is the raw samples of ``f``.
    """
    if grid is None:
        grid = GridSpec.for_frame(spec.N, gamma, spec.T)
    ns = grid_nodes(domain, grid, context="approx")
    meta = {"domain": domain.name, **ns.metadata()}
    return fit_points(f, ns.interior, spec, scale=1.0 / math.sqrt(grid.count), meta=meta, grid=grid)


def evaluate(ap: Approximant, points, d: DerivOrder | str = DerivOrder.VALUE) -> np.ndarray:
    return synthesize(ap.spec, ap.fourier_coefficients, points, d)


def error_grid(domain: Domain, grid: GridSpec, eval_density: int = 2) -> np.ndarray:
    if eval_density < 1:
        raise ValueError("eval_density must be >= 1")
    pts = restrict_interior(tensor_grid(grid.refined(int(eval_density))), domain)
    if len(pts) == 0:
        raise ValueError(f"no evaluation points inside {domain.name!r}")
    return pts


def max_error(ap: Approximant, f: ScalarField, domain: Domain, eval_density: int = 2,
              grid: GridSpec | None = None) -> float:
    """Sup of ``|f - ap|`` over interior points of a grid ``eval_density`` times finer
    than the fit grid (or ``grid`` when given)."""
    grid = grid or ap.grid or GridSpec.for_frame(ap.spec.N, 4.0, ap.spec.T)
    pts = error_grid(domain, grid, eval_density)
    return float(np.max(np.abs(sample(f, pts) - evaluate(ap, pts))))
