"""Test functions and manufactured-solution PDE problems.

Sources are ``F = beta*U - alpha_x*U_x - alpha_y*U_y - alpha*(U_xx + U_yy)``
with the derivatives of ``U`` worked out by hand below. For ``U = sin(w)``:
``U_x = cos(w) w_x`` and ``U_xx = -sin(w) w_x^2 + cos(w) w_xx``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .geometry import Domain, catalog
from .nodes import GridSpec
from .pde import BoundaryPolicy, CoefficientField, PdeProblem, RandomNodes

FUNCTIONS: dict[str, Callable] = {
    "f1": lambda x, y: np.abs(x * y) ** 3,
    "f2": lambda x, y: 1.0 / ((x - 1.1) ** 2 + (y - 1.1) ** 2) ** 1.5,
    "f3": lambda x, y: np.cos(5 * x + y) * np.sin(x - 3 * y),
    "f4": lambda x, y: np.exp(x + 2 * y),
}


def function(name: str) -> Callable:
    try:
        return FUNCTIONS[name]
    except KeyError:
        raise KeyError(f"unknown function preset {name!r}; valid: {', '.join(FUNCTIONS)}") from None


@dataclass(frozen=True)
class Solution:
    """Exact solution with its gradient and Laplacian."""

    u: Callable
    ux: Callable
    uy: Callable
    lap: Callable


def _sin_of(w, wx, wy, wxx, wyy) -> Solution:
    return Solution(
        u=lambda x, y: np.sin(w(x, y)),
        ux=lambda x, y: np.cos(w(x, y)) * wx(x, y),
        uy=lambda x, y: np.cos(w(x, y)) * wy(x, y),
        lap=lambda x, y: -np.sin(w(x, y)) * (wx(x, y) ** 2 + wy(x, y) ** 2) + np.cos(w(x, y)) * (wxx(x, y) + wyy(x, y)),
    )


# U = exp(-(x^2+y^2)/2): U_x = -x U, U_y = -y U, lap U = (x^2 + y^2 - 2) U
_GAUSS = Solution(
    u=lambda x, y: np.exp(-(x**2 + y**2) / 2),
    ux=lambda x, y: -x * np.exp(-(x**2 + y**2) / 2),
    uy=lambda x, y: -y * np.exp(-(x**2 + y**2) / 2),
    lap=lambda x, y: (x**2 + y**2 - 2) * np.exp(-(x**2 + y**2) / 2),
)

# w = pi/2 (x^2/0.36 + y^2/0.81 - 1): w_x = pi x/0.36, w_xx = pi/0.36
_ELLIPSE_SIN = _sin_of(
    lambda x, y: np.pi / 2 * (x**2 / 0.36 + y**2 / 0.81 - 1),
    lambda x, y: np.pi * x / 0.36,
    lambda x, y: np.pi * y / 0.81,
    lambda x, y: np.pi / 0.36 + 0 * x,
    lambda x, y: np.pi / 0.81 + 0 * x,
)

# w = pi (x^2 + y^2 - 0.81)/2: w_x = pi x, w_xx = pi
_LUNE_SIN = _sin_of(
    lambda x, y: np.pi * (x**2 + y**2 - 0.81) / 2,
    lambda x, y: np.pi * x,
    lambda x, y: np.pi * y,
    lambda x, y: np.pi + 0 * x,
    lambda x, y: np.pi + 0 * x,
)

# w = x^2 + y^2: w_x = 2x, w_xx = 2
_RADIAL_SIN = _sin_of(
    lambda x, y: x**2 + y**2,
    lambda x, y: 2 * x,
    lambda x, y: 2 * y,
    lambda x, y: 2 + 0 * x,
    lambda x, y: 2 + 0 * x,
)

# w = 4x^2 - 4x^4/0.81 - y^2: w_x = 8x - 16x^3/0.81, w_xx = 8 - 48x^2/0.81, w_y = -2y, w_yy = -2
_BOWTIE_SIN = _sin_of(
    lambda x, y: 4 * x**2 - 4 * x**4 / 0.81 - y**2,
    lambda x, y: 8 * x - 16 * x**3 / 0.81,
    lambda x, y: -2 * y,
    lambda x, y: 8 - 48 * x**2 / 0.81,
    lambda x, y: -2 + 0 * x,
)


def _pow52(s):
    return np.maximum(s, 0.0) ** 2.5


def _d2pow52(t):
    # d^2/dt^2 (1-t^2)^(5/2) = -5 (1-t^2)^(3/2) + 15 t^2 (1-t^2)^(1/2)
    s = np.maximum(1 - t**2, 0.0)
    return -5 * s**1.5 + 15 * t**2 * np.sqrt(s)


def _d1pow52(t):
    # d/dt (1-t^2)^(5/2) = -5 t (1-t^2)^(3/2)
    return -5 * t * np.maximum(1 - t**2, 0.0) ** 1.5


_CORNER = Solution(
    u=lambda x, y: _pow52(1 - x**2) * _pow52(1 - y**2),
    ux=lambda x, y: _d1pow52(x) * _pow52(1 - y**2),
    uy=lambda x, y: _pow52(1 - x**2) * _d1pow52(y),
    lap=lambda x, y: _d2pow52(x) * _pow52(1 - y**2) + _pow52(1 - x**2) * _d2pow52(y),
)

_EXP_ALPHA = CoefficientField(
    alpha=lambda x, y: np.exp(x + y),
    beta=lambda x, y: 0 * x,
    alpha_dx=lambda x, y: np.exp(x + y),
    alpha_dy=lambda x, y: np.exp(x + y),
)

# alpha = (sin x + 1)(cos y + 1): alpha_x = cos x (cos y + 1), alpha_y = -(sin x + 1) sin y
_TRIG_ALPHA = CoefficientField(
    alpha=lambda x, y: (np.sin(x) + 1) * (np.cos(y) + 1),
    beta=lambda x, y: np.exp(x + y),
    alpha_dx=lambda x, y: np.cos(x) * (np.cos(y) + 1),
    alpha_dy=lambda x, y: -(np.sin(x) + 1) * np.sin(y),
)


def manufactured_source(coeffs: CoefficientField, sol: Solution) -> Callable:
    adx, ady = coeffs.partials()

    def F(x, y):
        return (
            coeffs.beta(x, y) * sol.u(x, y)
            - adx(x, y) * sol.ux(x, y)
            - ady(x, y) * sol.uy(x, y)
            - coeffs.alpha(x, y) * sol.lap(x, y)
        )

    return F


@dataclass(frozen=True)
class ExamplePreset:
    name: str
    domain: str
    coeffs: CoefficientField
    solution: Solution
    policy: BoundaryPolicy
    x_density: float = 1.0
    random: bool = False
    spacing: str = "arclength"
    description: str = ""

    def problem(self, domain: Domain | None = None) -> PdeProblem:
        u = self.solution.u
        return PdeProblem(
            domain=domain or catalog(self.domain),
            coeffs=self.coeffs,
            source=manufactured_source(self.coeffs, self.solution),
            dirichlet=u,
            exact=u,
            name=self.name,
        )

    def nodes_for(self, N: int, gamma: float = 4.0, T: float = 2.0, seed: int = 0) -> GridSpec | RandomNodes:
        """Interior node rule of this example at per-axis size ``N``."""
        if self.random:
            return RandomNodes(seed)
        return GridSpec.for_frame(N, gamma, T, self.x_density)


EXAMPLES: dict[str, ExamplePreset] = {
    p.name: p
    for p in [
        ExamplePreset("example1", "pentagon", CoefficientField.constant(1.0, 10.0), _GAUSS,
                      BoundaryPolicy("log", 20), description="constant coefficients, alpha=1, beta=10"),
        ExamplePreset("example2", "ellipse", _EXP_ALPHA, _ELLIPSE_SIN, BoundaryPolicy("linear", 3),
                      description="alpha=exp(x+y), beta=0"),
        ExamplePreset("example3", "triangle", _TRIG_ALPHA, _GAUSS, BoundaryPolicy("linear", 6),
                      description="alpha=(sin x+1)(cos y+1), beta=exp(x+y)"),
        ExamplePreset("example4", "square", CoefficientField.constant(1.0, 0.0), _CORNER,
                      BoundaryPolicy("square", 4), description="corner singularity, Poisson"),
        ExamplePreset("example5", "lune", _EXP_ALPHA, _LUNE_SIN, BoundaryPolicy("linear", 6),
                      description="doubly connected lune"),
        ExamplePreset("example6", "five_petal_annulus", _EXP_ALPHA, _RADIAL_SIN, BoundaryPolicy("linear", 8),
                      x_density=2.0, description="doubly connected five-petal annulus, x-grid twice as dense"),
        ExamplePreset("example7", "bowtie", _EXP_ALPHA, _BOWTIE_SIN, BoundaryPolicy("linear", 4),
                      random=True, spacing="parameter",
                      description="uniform random interior nodes, N_I = 2 N_Lambda, boundary equispaced in t"),
    ]
}


def example(name: str) -> ExamplePreset:
    try:
        return EXAMPLES[name]
    except KeyError:
        raise KeyError(f"unknown example preset {name!r}; valid: {', '.join(EXAMPLES)}") from None


def preset_registry() -> dict[str, list[str]]:
    return {"examples": list(EXAMPLES), "functions": list(FUNCTIONS)}
