"""Oversampled collocation for ``-div(alpha grad U) + beta U = F`` with ``U = H``
on the boundary.

Interior rows are ``beta*A1 - alpha_x*A2 - alpha_y*A3 - alpha*(A4 + A5)``
with ``A1..A5`` the frame evaluation matrices for value, dx, dy, dxx and
dyy, each scaled row-wise by the sampled coefficient vector. Boundary rows
are plain frame values.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .extension import Approximant, ScalarField, error_grid, evaluate, sample
from .frames import DerivOrder, FrameSpec, axis_factors
from .geometry import Domain, as_points, boundary_nodes, corner_refine
from .linalg import SolverError, TsvdReport, tsvd_solve
from .nodes import GridSpec, NodeSet, grid_nodes, random_interior

FD_STEP = 1e-6


class CoefficientError(ValueError):
    pass


def _fd(alpha: ScalarField, axis: int) -> ScalarField:
    def d(x, y):
        h = FD_STEP
        if axis == 0:
            return (alpha(x + h, y) - alpha(x - h, y)) / (2 * h)
        return (alpha(x, y + h) - alpha(x, y - h)) / (2 * h)

    return d


@dataclass(frozen=True)
class CoefficientField:
    """Coefficients ``alpha``, its partials, and ``beta``.

    When the partials are omitted a central-difference fallback is used and
    :attr:`numeric_derivatives` is set.
    """

    alpha: ScalarField
    beta: ScalarField
    alpha_dx: ScalarField | None = None
    alpha_dy: ScalarField | None = None

    @property
    def numeric_derivatives(self) -> bool:
        return self.alpha_dx is None or self.alpha_dy is None

    def partials(self) -> tuple[ScalarField, ScalarField]:
        return (self.alpha_dx or _fd(self.alpha, 0), self.alpha_dy or _fd(self.alpha, 1))

    @classmethod
    def constant(cls, alpha: float = 1.0, beta: float = 0.0) -> "CoefficientField":
        return cls(
            alpha=lambda x, y: np.full(np.shape(x), float(alpha)),
            beta=lambda x, y: np.full(np.shape(x), float(beta)),
            alpha_dx=lambda x, y: np.zeros(np.shape(x)),
            alpha_dy=lambda x, y: np.zeros(np.shape(x)),
        )


@dataclass(frozen=True)
class PdeProblem:
    domain: Domain
    coeffs: CoefficientField
    source: ScalarField
    dirichlet: ScalarField
    exact: ScalarField | None = None
    name: str = "custom"


@dataclass(frozen=True)
class BoundaryPolicy:
    """Rule for the number of boundary nodes ``N_B`` as a function of ``N``.

    kinds: ``linear`` (K*N), ``log`` (c*floor(ln N_Lambda)), ``log10``
    (c*floor(log10 N_Lambda)), ``square`` (K*N - 4), ``count`` (fixed).
    """

    kind: str
    param: float

    KINDS = ("linear", "log", "log10", "square", "count")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown boundary policy {self.kind!r}; expected one of {self.KINDS}")
        if not self.param > 0:
            raise ValueError("boundary policy parameter must be positive")

    @classmethod
    def parse(cls, text: str) -> "BoundaryPolicy":
        kind, _, value = text.partition(":")
        if not value:
            raise ValueError(f"boundary policy must look like 'kind:value', got {text!r}")
        return cls(kind.strip(), float(value))

    def __call__(self, N: int, n_lambda: int | None = None) -> int:
        n_lambda = N * N if n_lambda is None else n_lambda
        c = self.param
        if self.kind == "linear":
            return int(round(c * N))
        if self.kind == "log":
            return int(round(c * math.floor(math.log(n_lambda))))
        if self.kind == "log10":
            return int(round(c * math.floor(math.log10(n_lambda))))
        if self.kind == "square":
            return int(round(c * N)) - 4
        return int(c)

    def __str__(self) -> str:
        p = int(self.param) if float(self.param).is_integer() else self.param
        return f"{self.kind}:{p}"


def boundary_policy(kind: str, param: float) -> BoundaryPolicy:
    return BoundaryPolicy(kind, param)


@dataclass(frozen=True)
class RandomNodes:
    """Uniform random interior nodes: ``factor * N_Lambda`` samples."""

    seed: int = 0
    factor: float = 2.0


@dataclass(frozen=True, eq=False)
class PdeSolution:
    approximant: Approximant
    report: TsvdReport
    nodes: NodeSet
    max_error: float | None = None
    policy: BoundaryPolicy | None = None
    runtime_ms: float = 0.0

    @property
    def spec(self) -> FrameSpec:
        return self.approximant.spec

    def metadata(self) -> dict:
        meta = {
            "N": self.spec.N,
            "N_Lambda": self.spec.size,
            "N_B_policy": str(self.policy) if self.policy else None,
            "counts": self.nodes.metadata(),
            "max_error": self.max_error,
            "cond": self.report.cond,
            "rank_eps": self.report.rank_eps,
            "runtime_ms": self.runtime_ms,
        }
        return meta


def _check_coefficients(coeffs: CoefficientField, pts: np.ndarray):
    x, y = pts[:, 0], pts[:, 1]
    ones = np.ones(len(pts))
    alpha = np.asarray(coeffs.alpha(x, y), dtype=float) * ones
    beta = np.asarray(coeffs.beta(x, y), dtype=float) * ones
    bad = np.flatnonzero(~(alpha > 0))
    if bad.size:
        i = int(bad[0])
        raise CoefficientError(f"alpha must be positive; alpha({x[i]:.17g}, {y[i]:.17g}) = {alpha[i]:.17g}")
    bad = np.flatnonzero(~(beta >= 0))
    if bad.size:
        i = int(bad[0])
        raise CoefficientError(f"beta must be non-negative; beta({x[i]:.17g}, {y[i]:.17g}) = {beta[i]:.17g}")
    adx, ady = coeffs.partials()
    alpha_x = np.asarray(adx(x, y), dtype=float) * ones
    alpha_y = np.asarray(ady(x, y), dtype=float) * ones
    return alpha, beta, alpha_x, alpha_y


def interior_block(coeffs: CoefficientField, points, spec: FrameSpec, out: np.ndarray | None = None,
                   chunk: int = 2048) -> np.ndarray:
    """Interior collocation rows; written into ``out`` when given."""
    pts = as_points(points)
    alpha, beta, alpha_x, alpha_y = _check_coefficients(coeffs, pts)
    n, N = spec.size, spec.N
    if out is None:
        out = np.empty((len(pts), n), dtype=complex)
    for a in range(0, len(pts), chunk):
        sl = slice(a, a + chunk)
        p = pts[sl]
        ex0, ey0 = axis_factors(spec, p, DerivOrder.VALUE)
        ex1 = axis_factors(spec, p, DerivOrder.DX)[0]
        ey1 = axis_factors(spec, p, DerivOrder.DY)[1]
        ex2 = axis_factors(spec, p, DerivOrder.DXX)[0]
        ey2 = axis_factors(spec, p, DerivOrder.DYY)[1]
        # row j, column (l1, l2): sum of per-axis products weighted by node coefficients
        xpart = beta[sl, None] * ex0 - alpha_x[sl, None] * ex1 - alpha[sl, None] * ex2
        block = xpart[:, :, None] * ey0[:, None, :]
        block -= (alpha_y[sl, None] * ex0)[:, :, None] * ey1[:, None, :]
        block -= (alpha[sl, None] * ex0)[:, :, None] * ey2[:, None, :]
        out[sl] = block.reshape(len(p), N * N)
    return out


def assemble(problem: PdeProblem, ns: NodeSet, spec: FrameSpec) -> tuple[np.ndarray, np.ndarray]:
    """Collocation matrix (interior rows over boundary rows) and right-hand side."""
    ns.check_oversampling(spec)
    P = np.empty((ns.n_interior + ns.n_boundary, spec.size), dtype=complex)
    interior_block(problem.coeffs, ns.interior, spec, out=P[: ns.n_interior])
    if ns.n_boundary:
        ex, ey = axis_factors(spec, ns.boundary)
        P[ns.n_interior :] = (ex[:, :, None] * ey[:, None, :]).reshape(ns.n_boundary, spec.size)
    rhs = np.concatenate([sample(problem.source, ns.interior), sample(problem.dirichlet, ns.boundary)])
    return P, rhs


def build_nodes(problem: PdeProblem, spec: FrameSpec, policy: BoundaryPolicy,
                grid: GridSpec | RandomNodes | None = None, corner_extra: int = 0,
                corner_radius: float = 0.1, spacing: str = "arclength") -> NodeSet:
    domain = problem.domain
    bnd = boundary_nodes(domain, policy(spec.N, spec.size), spacing)
    if corner_extra:
        bnd = corner_refine(bnd, domain, corner_extra, corner_radius)
    if isinstance(grid, RandomNodes):
        count = int(round(grid.factor * spec.size))
        return NodeSet(random_interior(domain, count, grid.seed), bnd, grid=None, seed=grid.seed)
    if grid is None:
        grid = GridSpec.for_frame(spec.N, 4.0, spec.T)
    return grid_nodes(domain, grid, bnd)


def solve(problem: PdeProblem, spec: FrameSpec, policy: BoundaryPolicy,
          grid: GridSpec | RandomNodes | None = None, eval_density: int = 2,
          error_grid_spec: GridSpec | None = None, corner_extra: int = 0,
          corner_radius: float = 0.1, spacing: str = "arclength") -> PdeSolution:
    """Build nodes, assemble, solve by truncated SVD and (if the exact
    solution is known) measure the max error on a refined interior grid."""
    t0 = time.perf_counter()
    ns = build_nodes(problem, spec, policy, grid, corner_extra, corner_radius, spacing)
    P, rhs = assemble(problem, ns, spec)
    try:
        u, report = tsvd_solve(P, rhs, spec.eps, overwrite=True)
    except SolverError:
        P, rhs = assemble(problem, ns, spec)
        u, report = tsvd_solve(P, rhs, spec.eps)
    del P
    ap = Approximant(spec, u, report, ns.metadata(), 1.0, ns.grid)
    err = None
    if problem.exact is not None:
        eg = error_grid_spec or ns.grid or GridSpec.for_frame(spec.N, 4.0, spec.T)
        pts = error_grid(problem.domain, eg, eval_density)
        err = float(np.max(np.abs(sample(problem.exact, pts) - evaluate(ap, pts))))
    runtime = 1e3 * (time.perf_counter() - t0)
    return PdeSolution(ap, report, ns, err, policy, runtime)


def residual_diagnostics(sol: PdeSolution, problem: PdeProblem, probe) -> dict:
    """Strong-form residual ``L U_N - F`` at ``probe`` points (max and RMS)."""
    pts = as_points(probe)
    x, y = pts[:, 0], pts[:, 1]
    ap = sol.approximant
    u = evaluate(ap, pts)
    ux, uy = evaluate(ap, pts, "dx"), evaluate(ap, pts, "dy")
    lap = evaluate(ap, pts, "dxx") + evaluate(ap, pts, "dyy")
    adx, ady = problem.coeffs.partials()
    c = problem.coeffs
    res = c.beta(x, y) * u - adx(x, y) * ux - ady(x, y) * uy - c.alpha(x, y) * lap - sample(problem.source, pts)
    r = np.abs(res)
    return {"max": float(r.max()) if r.size else 0.0, "rms": float(np.sqrt(np.mean(r**2))) if r.size else 0.0}
