"""Tensor Fourier frame on the box ``[-T, T]^2``.

The frame elements are ``exp(i*pi*(l1*x + l2*y)/T)`` for integer
multi-indices ``l``. Per axis there are ``N`` frequencies: ``-n..n`` when
``N = 2n + 1`` is odd, and ``-N/2..N/2-1`` when ``N`` is even. Columns of
every matrix follow :func:`linear_index` (row-major in ``(l1, l2)``).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .geometry import as_points


class DerivOrder(str, enum.Enum):
    VALUE = "value"
    DX = "dx"
    DY = "dy"
    DXX = "dxx"
    DYY = "dyy"


# (x-derivative order, y-derivative order)
_ORDERS = {
    DerivOrder.VALUE: (0, 0),
    DerivOrder.DX: (1, 0),
    DerivOrder.DY: (0, 1),
    DerivOrder.DXX: (2, 0),
    DerivOrder.DYY: (0, 2),
}


@dataclass(frozen=True)
class FrameSpec:
    N: int
    T: float = 2.0
    eps: float = 1e-14

    def __post_init__(self):
        if self.N < 1:
            raise ValueError(f"N must be >= 1, got {self.N}")
        if not self.T > 1:
            raise ValueError(f"T must exceed 1, got {self.T}")
        if not 0 < self.eps < 1:
            raise ValueError(f"eps must lie in (0, 1), got {self.eps}")

    @classmethod
    def from_half_degree(cls, n: int, T: float = 2.0, eps: float = 1e-14) -> "FrameSpec":
        return cls(2 * n + 1, T, eps)

    @property
    def n(self) -> int:
        return self.N // 2

    @property
    def size(self) -> int:
        """Total number of frame elements, ``N**2``."""
        return self.N * self.N

    @property
    def frequencies(self) -> np.ndarray:
        lo = -(self.N // 2)
        return np.arange(lo, lo + self.N)


def linear_index(spec: FrameSpec) -> np.ndarray:
    """Multi-indices in column order, shape ``(N**2, 2)``."""
    f = spec.frequencies
    l1, l2 = np.meshgrid(f, f, indexing="ij")
    return np.column_stack([l1.ravel(), l2.ravel()])


def column_of(spec: FrameSpec, l1: int, l2: int) -> int:
    f0 = spec.frequencies[0]
    if not (0 <= l1 - f0 < spec.N and 0 <= l2 - f0 < spec.N):
        raise IndexError(f"({l1}, {l2}) is not a frame index for N={spec.N}")
    return int((l1 - f0) * spec.N + (l2 - f0))


def _axis_factor(coord: np.ndarray, freqs: np.ndarray, T: float, order: int) -> np.ndarray:
    k = np.pi * freqs / T
    out = np.exp(1j * np.outer(coord, k))
    if order:
        out *= (1j * k) ** order
    return out


def axis_factors(spec: FrameSpec, points, d: DerivOrder | str = DerivOrder.VALUE) -> tuple[np.ndarray, np.ndarray]:
    """Per-axis factors ``(Ex, Ey)``, each of shape ``(k, N)``.

    The frame element ``(l1, l2)`` at point ``p`` (with derivative ``d``) is
    ``Ex[p, l1] * Ey[p, l2]``.
    """
    pts = as_points(points)
    ox, oy = _ORDERS[DerivOrder(d)]
    f = spec.frequencies
    return _axis_factor(pts[:, 0], f, spec.T, ox), _axis_factor(pts[:, 1], f, spec.T, oy)


def eval_basis(spec: FrameSpec, l, p, d: DerivOrder | str = DerivOrder.VALUE) -> complex:
    l1, l2 = l
    x, y = p
    ox, oy = _ORDERS[DerivOrder(d)]
    k1, k2 = np.pi * l1 / spec.T, np.pi * l2 / spec.T
    val = np.exp(1j * (k1 * x + k2 * y))
    return complex(val * (1j * k1) ** ox * (1j * k2) ** oy)


def eval_matrix(spec: FrameSpec, points, d: DerivOrder | str = DerivOrder.VALUE, scale: float = 1.0) -> np.ndarray:
    """Evaluation matrix of shape ``(len(points), N**2)``."""
    ex, ey = axis_factors(spec, points, d)
    if scale != 1.0:
        ex = ex * scale
    k = ex.shape[0]
    return (ex[:, :, None] * ey[:, None, :]).reshape(k, spec.size)


def synthesize(spec: FrameSpec, coefficients, points, d: DerivOrder | str = DerivOrder.VALUE, chunk: int = 65536) -> np.ndarray:
    """Evaluate ``sum_l c_l * D phi_l`` at ``points`` without forming the matrix."""
    pts = as_points(points)
    C = np.asarray(coefficients, dtype=complex).reshape(spec.N, spec.N)
    out = np.empty(len(pts), dtype=complex)
    for start in range(0, len(pts), chunk):
        ex, ey = axis_factors(spec, pts[start : start + chunk], d)
        out[start : start + chunk] = np.einsum("pj,pj->p", ex @ C, ey)
    return out
