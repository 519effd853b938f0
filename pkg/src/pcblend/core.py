"""Point-cloud basics: validation, unit-cube normalization, seeded noise.

A point cloud is a float64 array of shape ``(n, 3)``; functions here never
modify their input in place.
"""

from dataclasses import dataclass

import numpy as np


def as_cloud(points, name="cloud"):
    """Return ``points`` as a finite float64 ``(n, 3)`` array with n >= 1."""
    arr = np.asarray(points, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise ValueError(f"{name} must have shape (n, 3), got {arr.shape}")
    if arr.shape[0] == 0:
        raise ValueError(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite coordinates")
    return arr


def make_rng(seed):
    """Seeded generator; ``seed`` may be an int or a SeedSequence."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def derive_seed(seed, *keys):
    """Deterministic child seed for a sub-task identified by integer ``keys``."""
    ss = np.random.SeedSequence([int(seed), *[int(k) for k in keys]])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class NormalizationTransform:
    """Maps original coordinates ``p`` to ``(p - offset) * scale``."""

    scale: float
    offset: np.ndarray

    def apply(self, points):
        return (np.asarray(points, dtype=np.float64) - self.offset) * self.scale

    def inverse(self, points):
        return np.asarray(points, dtype=np.float64) / self.scale + self.offset


def normalize_unit_cube(points):
    """Isotropically rescale a cloud into ``[0, 1]^3``.

    The longest bounding-box edge is mapped to length 1 and the shorter axes
    are centred in the cube. A degenerate cloud (all points equal) is moved to
    the cube centre with scale 1.

    Returns the normalized cloud and the transform that produced it.
    """
    pts = as_cloud(points)
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    extent = hi - lo
    longest = extent.max()
    scale = 1.0 / longest if longest > 0 else 1.0
    # centre of the box must land on (0.5, 0.5, 0.5)
    offset = (lo + hi) / 2.0 - 0.5 / scale
    tf = NormalizationTransform(scale=float(scale), offset=offset)
    out = tf.apply(pts)
    np.clip(out, 0.0, 1.0, out=out)
    return out, tf


def perturb_gaussian(points, sigma, seed):
    """Add independent N(0, sigma^2) noise to every coordinate."""
    if sigma < 0:
        raise ValueError(f"sigma must be non-negative, got {sigma}")
    pts = as_cloud(points)
    if sigma == 0:
        return pts.copy()
    rng = make_rng(seed)
    return pts + rng.normal(0.0, sigma, size=pts.shape)
