import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fecollocation.frames import DerivOrder, FrameSpec, column_of, eval_basis, eval_matrix, linear_index, synthesize

SPEC = FrameSpec(21)
H = 1e-5

coords = st.floats(-1.5, 1.5, allow_nan=False)
freqs = st.integers(-10, 10)


def test_linear_index_n1():
    idx = linear_index(FrameSpec.from_half_degree(1))
    assert len(idx) == 9
    assert tuple(idx[0]) == (-1, -1)
    assert tuple(idx[-1]) == (1, 1)
    assert tuple(idx[4]) == (0, 0)


def test_linear_index_n2_and_even_sizes():
    assert len(linear_index(FrameSpec.from_half_degree(2))) == 25
    idx = linear_index(FrameSpec(10))
    assert len(idx) == 100
    assert idx[:, 0].min() == -5 and idx[:, 0].max() == 4
    assert len({tuple(r) for r in idx}) == 100


def test_column_of_roundtrip():
    spec = FrameSpec(7)
    for j, (l1, l2) in enumerate(linear_index(spec)):
        assert column_of(spec, l1, l2) == j
    with pytest.raises(IndexError):
        column_of(spec, 4, 0)


def test_spec_validation():
    with pytest.raises(ValueError):
        FrameSpec(5, T=1.0)
    with pytest.raises(ValueError):
        FrameSpec(5, eps=0)


def test_basis_examples():
    assert eval_basis(SPEC, (0, 0), (0.3, -0.7)) == 1
    assert eval_basis(SPEC, (1, 0), (SPEC.T, 0)) == pytest.approx(-1, abs=1e-15)


def test_dx_matches_finite_difference():
    l, (x, y) = (3, -2), (0.17, -0.42)
    fd = (eval_basis(SPEC, l, (x + H, y)) - eval_basis(SPEC, l, (x - H, y))) / (2 * H)
    an = eval_basis(SPEC, l, (x, y), "dx")
    assert abs(fd - an) / abs(an) <= 1e-8


def test_eval_matrix_examples():
    spec = FrameSpec.from_half_degree(1)
    row = eval_matrix(spec, [(0.4, -0.9)])
    assert row.shape == (1, 9)
    assert np.allclose(np.abs(row), 1, atol=1e-15)
    dxx = eval_matrix(spec, [(0.0, 0.0)], "dxx")[0]
    l1 = linear_index(spec)[:, 0]
    assert np.allclose(dxx, -((np.pi / spec.T) ** 2) * l1**2, atol=1e-15)


def test_eval_matrix_scale_and_entries(rng):
    spec = FrameSpec(6)
    pts = rng.uniform(-1, 1, (7, 2))
    nr = 48**2
    A = eval_matrix(spec, pts, "value", 1 / np.sqrt(nr))
    idx = linear_index(spec)
    direct = np.array([[np.exp(1j * np.pi * (l1 * x + l2 * y) / spec.T) for l1, l2 in idx] for x, y in pts])
    assert np.allclose(A, direct / np.sqrt(nr), atol=1e-15)
    for d in DerivOrder:
        M = eval_matrix(spec, pts, d)
        ref = np.array([[eval_basis(spec, l, p, d) for l in idx] for p in pts])
        assert np.allclose(M, ref, rtol=1e-13, atol=1e-13)


@settings(max_examples=60, deadline=None)
@given(freqs, freqs, coords, coords)
def test_unit_modulus(l1, l2, x, y):
    assert abs(abs(eval_basis(SPEC, (l1, l2), (x, y))) - 1) <= 1e-14


@settings(max_examples=60, deadline=None)
@given(freqs, freqs, coords, coords)
def test_conjugate_symmetry(l1, l2, x, y):
    a = eval_basis(SPEC, (-l1, -l2), (x, y))
    b = np.conj(eval_basis(SPEC, (l1, l2), (x, y)))
    assert abs(a - b) <= 1e-14


@settings(max_examples=60, deadline=None)
@given(freqs, freqs, coords, coords)
def test_laplacian_eigenfunction(l1, l2, x, y):
    v = eval_basis(SPEC, (l1, l2), (x, y))
    lap = eval_basis(SPEC, (l1, l2), (x, y), "dxx") + eval_basis(SPEC, (l1, l2), (x, y), "dyy")
    lam = -((np.pi / SPEC.T) ** 2) * (l1**2 + l2**2)
    assert abs(lap - lam * v) <= 1e-12 * max(abs(lam), 1)


def _fd_check(spec, l, p, d):
    """Central difference of the next-lower derivative order, real and imaginary parts separately."""
    x, y = p
    lower = {"dx": "value", "dy": "value", "dxx": "dx", "dyy": "dy"}[d]
    step = (H, 0) if d in ("dx", "dxx") else (0, H)
    f = lambda q: eval_basis(spec, l, q, lower)
    fd = (f((x + step[0], y + step[1])) - f((x - step[0], y - step[1]))) / (2 * H)
    an = eval_basis(spec, l, p, d)
    scale = max(abs(an), 1.0)
    return abs(fd.real - an.real) / scale, abs(fd.imag - an.imag) / scale


def test_derivative_consistency_random(rng):
    idx = rng.integers(-10, 11, (100, 2))
    pts = rng.uniform(-1, 1, (100, 2))
    worst = 0.0
    for l, p in zip(idx, pts):
        for d in ("dx", "dy", "dxx", "dyy"):
            worst = max(worst, *_fd_check(SPEC, tuple(l), tuple(p), d))
    assert worst <= 1e-6


def test_synthesize_matches_matrix(rng):
    spec = FrameSpec(9)
    pts = rng.uniform(-1, 1, (50, 2))
    c = rng.normal(size=spec.size) + 1j * rng.normal(size=spec.size)
    for d in DerivOrder:
        assert np.allclose(synthesize(spec, c, pts, d), eval_matrix(spec, pts, d) @ c, rtol=1e-12, atol=1e-12)
