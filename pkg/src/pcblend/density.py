"""Gaussian kernel density of a cloud and density-driven resampling of a design."""

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from . import config
from .core import as_cloud, make_rng, perturb_gaussian

# relative size of the kernel terms a truncated sum may drop
KDE_RTOL = 1e-14


@dataclass(frozen=True)
class Density:
    """Isotropic Gaussian KDE ``(1/n) sum_i N(q; x_i, bandwidth^2 I)``."""

    source: np.ndarray
    bandwidth: float = config.KDE_BANDWIDTH
    _tree: cKDTree = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "source", as_cloud(self.source, "source"))
        if not self.bandwidth > 0:
            raise ValueError(f"bandwidth must be positive, got {self.bandwidth}")
        object.__setattr__(self, "_tree", cKDTree(self.source))

    @property
    def log_norm(self):
        """Log of the kernel peak ``(2 pi sigma^2)^(-3/2)``."""
        return -1.5 * np.log(2.0 * np.pi * self.bandwidth**2)

    def log_evaluate(self, queries, chunk=4096):
        return kde_log_evaluate(self, queries, chunk=chunk)

    def evaluate(self, queries):
        return np.exp(self.log_evaluate(queries))


def _log_mean_exp(sq_dist, sigma, n):
    # a bandwidth so small that sigma^2 underflows yields -inf, reported by callers
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        z = -0.5 * sq_dist / sigma**2
        zmax = z.max(axis=-1, keepdims=True)
        out = (zmax + np.log(np.exp(z - zmax).sum(axis=-1, keepdims=True)))[..., 0]
    return np.where(np.isnan(out), -np.inf, out) - np.log(n)


def kde_log_evaluate(density, queries, chunk=4096):
    """Log-density at each query point.

    Only the nearest source points are summed: for every query the neighbour
    count is doubled until the terms left out are provably below
    ``KDE_RTOL`` times the kept ones.
    """
    q = np.atleast_2d(np.asarray(queries, dtype=np.float64))
    if q.shape[1] != 3 or not np.all(np.isfinite(q)):
        raise ValueError("queries must be finite points of shape (m, 3)")
    src = density.source
    n = len(src)
    sigma = density.bandwidth
    out = np.empty(len(q))

    todo = np.arange(len(q))
    kk = min(n, 32)
    while len(todo):
        if kk >= n:
            for s in range(0, len(todo), chunk):
                idx = todo[s:s + chunk]
                diff = q[idx, None, :] - src[None, :, :]
                out[idx] = _log_mean_exp(np.einsum("qnd,qnd->qn", diff, diff), sigma, n)
            break
        nxt = []
        for s in range(0, len(todo), chunk):
            idx = todo[s:s + chunk]
            d, _ = density._tree.query(q[idx], k=kk)
            d2 = d * d
            # each dropped term is at most exp(-(d_k^2 - d_0^2) / 2 sigma^2) of the largest
            gap = (d2[:, -1] - d2[:, 0]) / (2.0 * sigma**2)
            ok = np.log(n - kk) - gap <= np.log(KDE_RTOL)
            out[idx[ok]] = _log_mean_exp(d2[ok], sigma, n)
            nxt.append(idx[~ok])
        todo = np.concatenate(nxt)
        kk = min(n, 2 * kk)
    return out + density.log_norm


def kde_evaluate(density, query):
    """Density at one point or an ``(m, 3)`` array of points."""
    q = np.asarray(query, dtype=np.float64)
    vals = np.exp(kde_log_evaluate(density, q.reshape(-1, 3)))
    return float(vals[0]) if q.ndim == 1 else vals


def selection_probabilities(design, density):
    """Normalised KDE weights of the design points."""
    logd = kde_log_evaluate(density, design)
    top = logd.max()
    if not np.isfinite(top):
        raise ValueError(
            "density vanishes at every design point; increase the bandwidth"
        )
    w = np.exp(logd - top)
    return w / w.sum()


def density_subsample(design, density, count, noise_sigma=config.NOISE_SIGMA,
                      seed=config.DEFAULT_SEED):
    """Draw ``count`` design points with replacement, weighted by ``density``.

    Each drawn point is then jittered with N(0, noise_sigma^2) per coordinate
    so that repeated draws of one design point do not coincide.
    """
    design = as_cloud(design, "design")
    if count < 1:
        raise ValueError("count must be positive")
    probs = selection_probabilities(design, density)
    rng = make_rng(seed)
    idx = rng.choice(len(design), size=count, replace=True, p=probs)
    return perturb_gaussian(design[idx], noise_sigma, rng)


def style_source(x, design, bandwidth=config.KDE_BANDWIDTH, seed=config.DEFAULT_SEED,
                 noise_sigma=config.NOISE_SIGMA):
    """Resample ``design`` along the density of ``x``; same size as ``x``."""
    x = as_cloud(x, "X")
    return density_subsample(design, Density(x, bandwidth), len(x), noise_sigma, seed)
