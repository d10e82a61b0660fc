import numpy as np
import pytest

from fecollocation.extension import Approximant, evaluate, fit, fit_points, max_error, sample
from fecollocation.frames import FrameSpec, column_of, eval_matrix, linear_index
from fecollocation.geometry import catalog
from fecollocation.nodes import GridSpec, UndersampledError
from fecollocation.presets import FUNCTIONS

T = 2.0


def mode(l1, l2):
    return lambda x, y: np.exp(1j * np.pi * (l1 * x + l2 * y) / T)


@pytest.fixture(scope="module")
def pentagon():
    return catalog("pentagon")


def test_mode_in_span(pentagon):
    spec = FrameSpec(11)
    f = mode(1, 0)
    ap = fit(f, pentagon, spec)
    assert max_error(ap, f, pentagon) <= 1e-10


def test_span_reproduction_combination(pentagon, rng):
    spec = FrameSpec(9)
    idx = linear_index(spec)
    pick = idx[rng.choice(len(idx), 6, replace=False)]
    w = rng.normal(size=6) + 1j * rng.normal(size=6)
    f = lambda x, y: sum(c * mode(a, b)(x, y) for c, (a, b) in zip(w, pick))
    ap = fit(f, pentagon, spec)
    assert max_error(ap, f, pentagon) <= 1e-9


def test_scaling_matches_matrix_definition(pentagon):
    spec = FrameSpec(8)
    g = GridSpec.for_frame(8)
    ap = fit(FUNCTIONS["f4"], pentagon, spec, g)
    assert ap.synthesis_scale == pytest.approx(1 / np.sqrt(g.count))
    assert np.allclose(ap.fourier_coefficients, ap.coefficients / np.sqrt(g.count))


def test_evaluate_zero_and_one_hot(pentagon, rng):
    spec = FrameSpec(5)
    pts = rng.uniform(-0.5, 0.5, (10, 2))
    zero = Approximant(spec, np.zeros(spec.size, dtype=complex), synthesis_scale=0.1)
    assert np.all(evaluate(zero, pts) == 0)
    c = np.zeros(spec.size, dtype=complex)
    j = column_of(spec, 2, -1)
    c[j] = 1
    one = Approximant(spec, c, synthesis_scale=0.1)
    assert np.allclose(evaluate(one, pts), 0.1 * mode(2, -1)(pts[:, 0], pts[:, 1]), atol=1e-15)


def test_evaluate_reproduces_residual(pentagon):
    spec = FrameSpec(12)
    f = FUNCTIONS["f1"]
    g = GridSpec.for_frame(12)
    ap = fit(f, pentagon, spec, g)
    from fecollocation.nodes import grid_nodes

    nodes = grid_nodes(pentagon, g, context="approx").interior
    resid = np.linalg.norm(evaluate(ap, nodes) - sample(f, nodes))
    assert resid == pytest.approx(ap.fit_report.residual_norm, abs=1e-12)


def test_max_error_of_own_synthesis(pentagon, rng):
    spec = FrameSpec(7)
    ap = Approximant(spec, rng.normal(size=spec.size) + 0j, synthesis_scale=0.3)
    assert max_error(ap, lambda x, y: evaluate(ap, np.column_stack([x, y])), pentagon) <= 1e-13
    with pytest.raises(ValueError):
        max_error(ap, FUNCTIONS["f4"], pentagon, eval_density=0)


def test_undersampled_error_names_counts(pentagon):
    with pytest.raises(UndersampledError, match=r"N_Omega = \d+ <= N_Lambda = 400"):
        fit(FUNCTIONS["f4"], pentagon, FrameSpec(20), GridSpec.for_frame(20, gamma=1.0))


def test_real_symmetry(pentagon):
    # odd N: the frequency set is symmetric, so real data gives a real series
    # up to the plateau-level noise of the truncated solve
    spec = FrameSpec(31)
    f = FUNCTIONS["f4"]
    ap = fit(f, pentagon, spec)
    from fecollocation.extension import error_grid

    pts = error_grid(pentagon, ap.grid)
    vals = evaluate(ap, pts)
    assert np.max(np.abs(vals.imag)) <= 1e-9 * (1 + np.max(np.abs(sample(f, pts))))


def test_fit_points_default_scale(pentagon, rng):
    spec = FrameSpec(5)
    pts = rng.uniform(-0.5, 0.5, (60, 2))
    ap = fit_points(mode(0, 1), pts, spec)
    assert ap.synthesis_scale == pytest.approx(1 / np.sqrt(60))
    assert np.allclose(evaluate(ap, pts), mode(0, 1)(pts[:, 0], pts[:, 1]), atol=1e-10)


@pytest.fixture(scope="module")
def f4_curve(pentagon):
    f = FUNCTIONS["f4"]
    return {N: max_error(fit(f, pentagon, FrameSpec(N)), f, pentagon) for N in (10, 15, 20, 25, 30)}


def test_f4_exponential_decay(f4_curve):
    assert f4_curve[10] / f4_curve[25] >= 10
    assert f4_curve[30] <= 1e-8


def test_f1_decays_slower_than_f4(pentagon, f4_curve):
    f1 = FUNCTIONS["f1"]
    e1 = max_error(fit(f1, pentagon, FrameSpec(25)), f1, pentagon)
    assert e1 > 100 * f4_curve[25]


def test_f2_on_triangle_spectral():
    d = catalog("triangle")
    f = FUNCTIONS["f2"]
    errs = [max_error(fit(f, d, FrameSpec(N)), f, d) for N in (16, 22, 30)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] <= 1e-7


def test_lune_is_worse_than_pentagon(pentagon):
    f = FUNCTIONS["f3"]
    lune = catalog("lune")
    e_lune = max_error(fit(f, lune, FrameSpec(30)), f, lune)
    e_pent = max_error(fit(f, pentagon, FrameSpec(30)), f, pentagon)
    assert e_lune > e_pent


@pytest.mark.xfail(strict=True, reason="measured plateaus differ ~20-40x: gamma=6 reaches ~1e-11, gamma=4 ~2e-10")
def test_oversampling_sensitivity(pentagon):
    f = FUNCTIONS["f4"]
    Ns = (30, 35, 40)
    g4 = [max_error(fit(f, pentagon, FrameSpec(N), gamma=4), f, pentagon) for N in Ns]
    g6 = [max_error(fit(f, pentagon, FrameSpec(N), gamma=6), f, pentagon, grid=GridSpec.for_frame(N, 4)) for N in Ns]
    assert 0.1 <= np.median(g4) / np.median(g6) <= 10
