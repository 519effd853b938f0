import numpy as np
import pytest

from pcblend.datagen import WALL_BOX, gen_design, gen_fixture
from pcblend.density import (Density, density_subsample, kde_evaluate, kde_log_evaluate,
                             selection_probabilities, style_source)


def direct_kde(src, q, sigma):
    d2 = ((q[:, None, :] - src[None, :, :]) ** 2).sum(-1)
    return np.exp(-0.5 * d2 / sigma**2).mean(1) * (2 * np.pi * sigma**2) ** -1.5


def test_default_bandwidth():
    assert Density(np.zeros((1, 3))).bandwidth == 0.01
    with pytest.raises(ValueError):
        Density(np.zeros((1, 3)), 0.0)


def test_peak_and_decay():
    d = Density(np.array([[0.5, 0.5, 0.5]]), 0.01)
    peak = (2 * np.pi * 0.01**2) ** -1.5
    assert kde_evaluate(d, [0.5, 0.5, 0.5]) == pytest.approx(peak, rel=1e-14)
    assert kde_evaluate(d, [0.5, 0.5, 0.7]) < 1e-30 * peak


@pytest.mark.parametrize("n, sigma", [(50, 0.01), (50, 0.3), (3000, 0.01), (3000, 0.05)])
def test_matches_direct_sum(n, sigma):
    rng = np.random.default_rng(n)
    src = rng.random((n, 3))
    q = np.vstack([src + rng.normal(scale=sigma, size=src.shape), rng.random((300, 3))])
    got = kde_evaluate(Density(src, sigma), q)
    want = direct_kde(src, q, sigma)
    ok = want > 0
    assert np.max(np.abs(got[ok] - want[ok]) / want[ok]) < 1e-12


def test_log_evaluate_stays_finite_far_away():
    d = Density(np.zeros((10, 3)), 0.01)
    val = kde_log_evaluate(d, np.array([[1.0, 1.0, 1.0]]))
    assert np.isfinite(val[0])
    assert val[0] == pytest.approx(d.log_norm - 0.5 * 3 / 0.01**2)


def test_translation_equivariance(rng):
    src = rng.random((100, 3))
    q = rng.random((20, 3))
    shift = np.array([0.3, -0.2, 0.1])
    a = Density(src, 0.05).evaluate(q)
    b = Density(src + shift, 0.05).evaluate(q + shift)
    np.testing.assert_allclose(a, b, rtol=1e-12)


def test_half_cube_support():
    rng = np.random.default_rng(1)
    src = rng.random((5000, 3)) * [0.5, 1, 1]
    g = (np.arange(10) + 0.5) / 10
    design = np.stack(np.meshgrid(g, g, g, indexing="ij"), -1).reshape(-1, 3)
    out = density_subsample(design, Density(src, 0.01), 10_000, noise_sigma=0.0, seed=2)
    assert np.mean(out[:, 0] < 0.5 + 3 * 0.01) >= 0.99
    # with zero noise the output is made of design points
    assert np.all(np.min(((out[:, None] - design[None]) ** 2).sum(-1), axis=1) == 0)


def test_uniform_selection_frequencies():
    design = np.array([[0.2, 0.5, 0.5], [0.4, 0.5, 0.5], [0.6, 0.5, 0.5], [0.8, 0.5, 0.5]])
    d = Density(design, 0.01)
    p = selection_probabilities(design, d)
    np.testing.assert_allclose(p, 0.25, rtol=1e-12)
    count = 40_000
    out = density_subsample(design, d, count, noise_sigma=0.0, seed=5)
    freq = np.array([(out[:, 0] == x).sum() for x in design[:, 0]])
    sd = np.sqrt(count * 0.25 * 0.75)
    assert np.all(np.abs(freq - count / 4) <= 3 * sd)


def test_count_and_noise():
    design = np.array([[0.5, 0.5, 0.5], [0.6, 0.5, 0.5]])
    out = density_subsample(design, Density(design), 50, noise_sigma=0.001, seed=1)
    assert out.shape == (50, 3)
    assert len(np.unique(out, axis=0)) == 50
    assert np.max(np.min(np.abs(out[:, :1] - design[None, :, 0]), axis=1)) < 0.01
    with pytest.raises(ValueError):
        density_subsample(design, Density(design), 0)


def test_underflow_raises():
    d = Density(np.zeros((1, 3)), 1e-160)
    with pytest.raises(ValueError, match="bandwidth"):
        selection_probabilities(np.ones((3, 3)), d)


def test_style_source_size_and_determinism(rng):
    x = rng.random((300, 3))
    design = rng.random((500, 3))
    a = style_source(x, design, seed=4)
    assert a.shape == x.shape
    np.testing.assert_array_equal(a, style_source(x, design, seed=4))


def test_style_source_uniform_grid_symmetry():
    g = (np.arange(5) + 0.5) / 5
    grid = np.stack(np.meshgrid(g, g, g, indexing="ij"), -1).reshape(-1, 3)
    x = np.repeat(grid, 40, axis=0)
    out = style_source(x, grid, bandwidth=0.01, seed=0, noise_sigma=0.0)
    counts = np.array([np.sum(np.all(out == p, axis=1)) for p in grid])
    assert counts.sum() == len(x)
    p = 1 / len(grid)
    sd = np.sqrt(len(x) * p * (1 - p))
    assert np.all(np.abs(counts - len(x) * p) <= 4 * sd)


def test_wall_slab_support():
    x = gen_fixture("wall", 4000, seed=1)
    design = gen_design("stripes", 40_000, seed=2)
    out = style_source(x, design, bandwidth=0.01, seed=3)
    lo, hi = np.array(WALL_BOX[0]), np.array(WALL_BOX[1])
    dist = np.linalg.norm(np.maximum(lo - out, 0) + np.maximum(out - hi, 0), axis=1)
    assert np.mean(dist <= 3 * 0.01 + 3 * 0.001) >= 0.99
