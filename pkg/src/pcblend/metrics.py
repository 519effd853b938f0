"""Distances between point clouds: Chamfer, exact EMD, Sinkhorn divergence."""

import itertools
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial import cKDTree

from . import config
from .core import as_cloud, make_rng


SELF_TOL = 1e-6


class SinkhornConvergenceWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class LossWeights:
    alpha_emd: float
    alpha_chamfer: float

    def __post_init__(self):
        for name in ("alpha_emd", "alpha_chamfer"):
            v = getattr(self, name)
            if not np.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be finite and non-negative, got {v}")


@dataclass(frozen=True)
class SinkhornParams:
    blur: float = config.SINKHORN_BLUR
    scaling: float = config.SINKHORN_SCALING
    max_iters: int = config.SINKHORN_MAX_ITERS
    tol: float = 1e-2

    def __post_init__(self):
        if not self.blur > 0:
            raise ValueError(f"blur must be positive, got {self.blur}")
        if not 0 < self.scaling < 1:
            raise ValueError(f"scaling must lie in (0, 1), got {self.scaling}")
        if self.max_iters < 1:
            raise ValueError("max_iters must be positive")


def _nn_sq_dist(x, y):
    # the tree only picks the neighbour; squared distances are recomputed from
    # coordinates so they do not carry the tree's sqrt round-off
    _, idx = cKDTree(y).query(x)
    diff = x - y[idx]
    return np.einsum("ij,ij->i", diff, diff)


def chamfer(x, y):
    """Sum of squared nearest-neighbour distances, in both directions."""
    x = as_cloud(x, "X")
    y = as_cloud(y, "Y")
    return float(_nn_sq_dist(x, y).sum() + _nn_sq_dist(y, x).sum())


def distance_matrix(x, y):
    diff = x[:, None, :] - y[None, :, :]
    return np.sqrt(np.einsum("ijd,ijd->ij", diff, diff))


def emd_exact(x, y):
    """Minimal total Euclidean cost over bijections between equal-size clouds.

    Returns ``(cost, perm)`` where ``x[i]`` is matched to ``y[perm[i]]``. The
    cost is a sum over points, not a mean.
    """
    x = as_cloud(x, "X")
    y = as_cloud(y, "Y")
    if len(x) != len(y):
        raise ValueError(f"exact EMD needs equal sizes, got {len(x)} and {len(y)}")
    d = distance_matrix(x, y)
    rows, perm = linear_sum_assignment(d)
    return float(d[rows, perm].sum()), perm


@dataclass(frozen=True)
class SinkhornResult:
    value: float
    converged: bool
    iterations: int
    epsilon: float


def _softmin(eps, cost, h, block=256):
    # -eps * log sum_j exp(h_j - cost_ij / eps), h = log-weights + potential / eps;
    # row blocks keep the temporaries in cache
    out = np.empty(len(cost))
    buf = np.empty((min(block, len(cost)), cost.shape[1]))
    for s in range(0, len(cost), block):
        z = buf[: min(block, len(cost) - s)]
        np.divide(cost[s:s + block], -eps, out=z)
        z += h
        zmax = z.max(axis=1)
        z -= zmax[:, None]
        np.exp(z, out=z)
        out[s:s + len(z)] = -eps * (zmax + np.log(z.sum(axis=1)))
    return out


def _epsilon_schedule(diameter, blur, scaling):
    eps = [diameter]
    while eps[-1] * scaling > blur:
        eps.append(eps[-1] * scaling)
    eps.append(blur)
    return eps


def sinkhorn(x, y, params=None):
    """Debiased Sinkhorn divergence with uniform weights and cost ``|x - y|``.

    The entropic scale is annealed from the diameter of the joint bounding box
    down to ``params.blur`` by factor ``params.scaling``, one symmetric update
    per step. At the final scale, alternating updates continue until the L1
    error of the plan's marginals drops below ``params.tol`` (total mass is
    one) or ``params.max_iters`` updates have been made in total.

    ``value`` is per unit mass: it approximates the mean EMD, not the sum.
    """
    params = params or SinkhornParams()
    x = as_cloud(x, "X")
    y = as_cloud(y, "Y")
    a = np.full(len(x), 1.0 / len(x))
    b = np.full(len(y), 1.0 / len(y))
    la = np.log(a)
    lb = np.log(b)
    cxy = distance_matrix(x, y)
    cyx = np.ascontiguousarray(cxy.T)
    cxx = distance_matrix(x, x)
    cyy = distance_matrix(y, y)
    both = np.vstack([x, y])
    diameter = float(np.linalg.norm(both.max(axis=0) - both.min(axis=0)))
    schedule = _epsilon_schedule(max(diameter, params.blur), params.blur, params.scaling)

    eps = schedule[0]
    f = _softmin(eps, cxy, lb)
    g = _softmin(eps, cyx, la)
    p = _softmin(eps, cxx, la)
    q = _softmin(eps, cyy, lb)
    iters = 0
    for eps in schedule:
        f, g = (
            0.5 * (f + _softmin(eps, cxy, lb + g / eps)),
            0.5 * (g + _softmin(eps, cyx, la + f / eps)),
        )
        p = 0.5 * (p + _softmin(eps, cxx, la + p / eps))
        q = 0.5 * (q + _softmin(eps, cyy, lb + q / eps))
        iters += 1

    def marginal_error(w, pot, new):
        # the plan built from the current potentials has marginals w * exp((pot - new) / eps)
        return float(np.abs(w * np.expm1((pot - new) / eps)).sum())

    # self-transport plans are close to the identity and converge in a few steps
    self_ok = False
    for _ in range(params.max_iters):
        tp = _softmin(eps, cxx, la + p / eps)
        tq = _softmin(eps, cyy, lb + q / eps)
        err = max(marginal_error(a, p, tp), marginal_error(b, q, tq))
        p = 0.5 * (p + tp)
        q = 0.5 * (q + tq)
        if err <= SELF_TOL:
            self_ok = True
            break

    converged = False
    while iters < params.max_iters:
        f_new = _softmin(eps, cxy, lb + g / eps)
        err = marginal_error(a, f, f_new)
        f = f_new
        g = _softmin(eps, cyx, la + f / eps)
        iters += 1
        if err <= params.tol:
            converged = True
            break

    value = float(a @ (f - p) + b @ (g - q))
    return SinkhornResult(value, converged and self_ok, iters, eps)


def sinkhorn_divergence(x, y, params=None):
    """Per-unit-mass Sinkhorn divergence; warns if it did not converge."""
    res = sinkhorn(x, y, params)
    if not res.converged:
        warnings.warn(
            f"Sinkhorn did not converge in {res.iterations} iterations",
            SinkhornConvergenceWarning,
            stacklevel=2,
        )
    return res.value


def emd_term(x, y, params=None, mode="sinkhorn", normalization="mean"):
    """EMD or its Sinkhorn surrogate, as a mean (per point) or a sum."""
    if normalization not in ("mean", "sum"):
        raise ValueError(f"normalization must be 'mean' or 'sum', got {normalization!r}")
    x = as_cloud(x, "X")
    y = as_cloud(y, "Y")
    if mode == "exact":
        value = emd_exact(x, y)[0]
        return value / len(x) if normalization == "mean" else value
    if mode == "sinkhorn":
        value = sinkhorn_divergence(x, y, params)
        return value if normalization == "mean" else value * len(x)
    raise ValueError(f"mode must be 'sinkhorn' or 'exact', got {mode!r}")


def combined_loss(x, y, weights, params=None, mode="sinkhorn", normalization="mean"):
    """``alpha_emd * EMD + alpha_chamfer * Chamfer`` for equal-size clouds."""
    x = as_cloud(x, "X")
    y = as_cloud(y, "Y")
    if len(x) != len(y):
        raise ValueError(f"combined loss needs equal sizes, got {len(x)} and {len(y)}")
    total = 0.0
    if weights.alpha_emd:
        total += weights.alpha_emd * emd_term(x, y, params, mode, normalization)
    if weights.alpha_chamfer:
        total += weights.alpha_chamfer * chamfer(x, y)
    return total


def calibrate_weights(dataset, num_pairs=config.CALIBRATION_PAIRS, seed=config.DEFAULT_SEED,
                      params=None, mode="sinkhorn", normalization="mean"):
    """Loss weights as reciprocals of Monte-Carlo estimates of the maxima.

    ``num_pairs`` unordered pairs are drawn uniformly without replacement; if
    that covers every pair, all pairs are used.
    """
    clouds = [as_cloud(c) for c in dataset]
    if len(clouds) < 2:
        raise ValueError("calibration needs at least two clouds")
    if num_pairs < 1:
        raise ValueError("num_pairs must be positive")
    pairs = list(itertools.combinations(range(len(clouds)), 2))
    if num_pairs < len(pairs):
        rng = make_rng(seed)
        chosen = np.sort(rng.choice(len(pairs), size=num_pairs, replace=False))
        pairs = [pairs[i] for i in chosen]

    max_emd = 0.0
    max_ch = 0.0
    for i, j in pairs:
        max_emd = max(max_emd, emd_term(clouds[i], clouds[j], params, mode, normalization))
        max_ch = max(max_ch, chamfer(clouds[i], clouds[j]))
    if max_emd <= 0 or max_ch <= 0:
        raise ValueError("all sampled pairs have zero distance; cannot calibrate weights")
    return LossWeights(alpha_emd=1.0 / max_emd, alpha_chamfer=1.0 / max_ch)
