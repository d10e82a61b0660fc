"""Truncated-SVD least squares for rectangular complex systems."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg


class SolverError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class TsvdReport:
    singular_values: np.ndarray
    rank_eps: int
    cond: float
    residual_norm: float
    solution_norm: float
    eps: float

    def normalized(self) -> np.ndarray:
        s = self.singular_values
        return s / s[0] if len(s) and s[0] > 0 else np.zeros_like(s)

    def summary(self) -> dict:
        return {
            "rank_eps": self.rank_eps,
            "cond": self.cond,
            "residual_norm": self.residual_norm,
            "solution_norm": self.solution_norm,
            "sigma_max": float(self.singular_values[0]) if len(self.singular_values) else 0.0,
            "sigma_min": float(self.singular_values[-1]) if len(self.singular_values) else 0.0,
        }


def _svd(A: np.ndarray, overwrite: bool):
    if not np.all(np.isfinite(A)):
        raise SolverError("matrix contains non-finite entries")
    try:
        return scipy.linalg.svd(A, full_matrices=False, lapack_driver="gesdd", overwrite_a=overwrite, check_finite=False)
    except np.linalg.LinAlgError as exc:
        if overwrite:
            # storage of A is gone; the caller must rebuild it
            raise SolverError(f"gesdd failed on a {A.shape[0]}x{A.shape[1]} system") from exc
    try:
        return scipy.linalg.svd(A, full_matrices=False, lapack_driver="gesvd", check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise SolverError(f"SVD failed to converge for a {A.shape[0]}x{A.shape[1]} system") from exc


def tsvd_solve(A, b, eps: float = 1e-14, overwrite: bool = False) -> tuple[np.ndarray, TsvdReport]:
    """Minimum-norm least-squares solution restricted to ``sigma_i >= eps * sigma_max``.

    Returns the coefficient vector and a :class:`TsvdReport`. With
    ``overwrite=True`` the storage of ``A`` is reused by the SVD and the
    residual is computed from the left singular vectors instead of ``A @ x``.
    """
    A = np.asarray(A, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if A.ndim != 2 or min(A.shape) < 1:
        raise ValueError(f"A must be a non-empty matrix, got shape {A.shape}")
    if b.shape != (A.shape[0],):
        raise ValueError(f"b has shape {b.shape}, expected ({A.shape[0]},)")
    if not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")

    U, s, Vh = _svd(A, overwrite)
    smax = s[0] if len(s) else 0.0
    if smax == 0:
        x = np.zeros(A.shape[1], dtype=complex)
        report = TsvdReport(s, 0, np.inf, float(np.linalg.norm(b)), 0.0, eps)
        return x, report

    keep = s >= eps * smax
    r = int(keep.sum())
    coef = U[:, :r].conj().T @ b
    x = Vh[:r].conj().T @ (coef / s[:r])
    fitted = U[:, :r] @ coef if overwrite else A @ x
    smin = s[-1] if len(s) == min(A.shape) else 0.0
    cond = float(smax / smin) if smin > 0 else np.inf
    report = TsvdReport(
        singular_values=s,
        rank_eps=r,
        cond=cond,
        residual_norm=float(np.linalg.norm(fitted - b)),
        solution_norm=float(np.linalg.norm(x)),
        eps=eps,
    )
    return x, report


def plunge_region_size(report_or_sigma, eps: float = 1e-14) -> int:
    """Number of normalized singular values strictly inside ``(eps, 1 - eps)``."""
    if isinstance(report_or_sigma, TsvdReport):
        s = report_or_sigma.normalized()
    else:
        s = np.asarray(report_or_sigma, dtype=float)
        s = s / s.max() if s.size and s.max() > 0 else s
    return int(np.count_nonzero((s > eps) & (s < 1 - eps)))
