"""Equal-size constrained k-means.

Every iteration alternates an exact balanced assignment (a min-cost flow, see
:mod:`pcblend.flow`) with a centroid update, stopping once the centroids stop
moving.
"""

import os
from dataclasses import dataclass, field

import numpy as np

from . import config
from .core import as_cloud, make_rng
from .flow import balanced_assignment
from .io import read_ply, write_ply


def half_sq_dist(points, centroids):
    """(n, k) matrix of ``0.5 * |x_i - C_h|^2``."""
    diff = points[:, None, :] - centroids[None, :, :]
    return 0.5 * np.einsum("nkd,nkd->nk", diff, diff)


def assignment_cost(points, centroids, labels):
    diff = points - centroids[labels]
    return float(0.5 * np.einsum("nd,nd->", diff, diff))


def _cluster_size(n, k):
    if k < 1 or n % k:
        raise ValueError(f"cannot split n={n} points into k={k} equal clusters")
    return n // k


@dataclass(frozen=True)
class ClusterSet:
    """A balanced partition of ``points`` into ``k`` clusters of ``m`` points.

    ``centroids`` are the centres the final assignment was solved against, so
    re-assigning the same points to them reproduces the same problem.
    """

    points: np.ndarray
    labels: np.ndarray
    centroids: np.ndarray
    iterations: int = 0
    objective: float = 0.0
    converged: bool = True
    history: tuple = field(default=(), repr=False)

    @property
    def k(self):
        return len(self.centroids)

    @property
    def m(self):
        return len(self.points) // self.k

    def indices(self, h):
        return np.flatnonzero(self.labels == h)

    def cluster(self, h):
        return self.points[self.labels == h]

    @property
    def clusters(self):
        return [self.cluster(h) for h in range(self.k)]


def cluster_assignment(points, centroids, m, prices=None):
    """Optimal balanced assignment of ``points`` to ``centroids``.

    Minimises ``sum_i 0.5 * |x_i - C_label(i)|^2`` subject to every centroid
    receiving exactly ``m`` points. Returns the label vector (and the sink
    prices when ``prices`` is given, for warm starts).
    """
    pts = as_cloud(points, "points")
    cents = np.asarray(centroids, dtype=np.float64).reshape(-1, 3)
    k = len(cents)
    if k < 1 or len(pts) != k * m:
        raise ValueError(f"n={len(pts)} points cannot fill k={k} clusters of size m={m}")
    if k == 1:
        labels = np.zeros(len(pts), dtype=np.intp)
        return (labels, np.zeros(1)) if prices is not None else labels
    labels, new_prices = balanced_assignment(half_sq_dist(pts, cents), m, prices)
    return (labels, new_prices) if prices is not None else labels


def cluster_update(points, labels, prev_centroids):
    """Per-cluster means; empty clusters keep their previous centroid."""
    pts = np.asarray(points, dtype=np.float64)
    prev = np.asarray(prev_centroids, dtype=np.float64).reshape(-1, 3)
    k = len(prev)
    counts = np.bincount(labels, minlength=k).astype(np.float64)
    sums = np.zeros((k, 3))
    np.add.at(sums, labels, pts)
    out = prev.copy()
    nz = counts > 0
    out[nz] = sums[nz] / counts[nz, None]
    return out


def kmeans_pp_init(points, k, rng):
    """k-means++ seeding (D^2 sampling)."""
    n = len(points)
    centers = np.empty((k, 3))
    centers[0] = points[rng.integers(n)]
    d2 = ((points - centers[0]) ** 2).sum(axis=1)
    for h in range(1, k):
        total = d2.sum()
        if total > 0:
            idx = rng.choice(n, p=d2 / total)
        else:
            idx = rng.integers(n)
        centers[h] = points[idx]
        d2 = np.minimum(d2, ((points - centers[h]) ** 2).sum(axis=1))
    return centers


def constrained_kmeans(points, k, seed=config.DEFAULT_SEED,
                       max_iters=config.KMEANS_MAX_ITERS, tol=config.KMEANS_TOL,
                       init=None):
    """Cluster ``points`` into ``k`` clusters of exactly ``n / k`` points.

    Stops when no centroid coordinate moves by more than ``tol`` or after
    ``max_iters`` rounds. ``init`` overrides the seeded k-means++ start.
    """
    pts = as_cloud(points, "points")
    n = len(pts)
    m = _cluster_size(n, k)
    if max_iters < 1:
        raise ValueError("max_iters must be positive")

    if k == 1:
        # the assignment is forced and its mean is already a fixed point
        cents = pts.mean(axis=0, keepdims=True)
        labels = np.zeros(n, dtype=np.intp)
        obj = assignment_cost(pts, cents, labels)
        return ClusterSet(pts, labels, cents, 1, obj, True, (obj,))

    rng = make_rng(seed)
    if init is None:
        cents = kmeans_pp_init(pts, k, rng)
    else:
        cents = np.array(init, dtype=np.float64).reshape(k, 3)

    prices = np.zeros(k)
    history = []
    converged = False
    it = 0
    for it in range(1, max_iters + 1):
        labels, prices = cluster_assignment(pts, cents, m, prices)
        history.append(assignment_cost(pts, cents, labels))
        new = cluster_update(pts, labels, cents)
        if np.max(np.abs(new - cents)) <= tol:
            converged = True
            break
        cents = new

    # cold re-solve so that the labels depend only on (points, centroids)
    labels = cluster_assignment(pts, cents, m)
    obj = assignment_cost(pts, cents, labels)
    return ClusterSet(pts, labels, cents, it, obj, converged, tuple(history))


def assign_to_shared_centroids(points, reference):
    """Cluster a second cloud against the centroids of ``reference``.

    The centroids are reused verbatim and never updated, so cluster ``h`` of
    both sets shares the same centre.
    """
    pts = as_cloud(points, "points")
    if len(pts) != reference.k * reference.m:
        raise ValueError(
            f"cloud has {len(pts)} points, reference expects k*m = "
            f"{reference.k}*{reference.m} = {reference.k * reference.m}"
        )
    labels = cluster_assignment(pts, reference.centroids, reference.m)
    obj = assignment_cost(pts, reference.centroids, labels)
    return ClusterSet(pts, labels, reference.centroids, 0, obj, True, (obj,))


def save_cluster_set(cs, directory):
    """Write one PLY per cluster plus ``manifest.txt``."""
    os.makedirs(directory, exist_ok=True)
    lines = [
        f"k {cs.k}",
        f"m {cs.m}",
        f"objective {float(cs.objective)!r}",
        f"iterations {cs.iterations}",
        f"converged {int(cs.converged)}",
    ]
    for h in range(cs.k):
        name = f"cluster_{h:03d}.ply"
        write_ply(cs.cluster(h), os.path.join(directory, name))
        c = cs.centroids[h]
        lines.append(f"centroid {h} {float(c[0])!r} {float(c[1])!r} {float(c[2])!r} {name}")
    with open(os.path.join(directory, "manifest.txt"), "w") as f:
        f.write("\n".join(lines) + "\n")


def load_cluster_set(directory):
    """Inverse of :func:`save_cluster_set` (points at PLY float32 precision)."""
    meta = {}
    cents = []
    files = []
    with open(os.path.join(directory, "manifest.txt")) as f:
        for lineno, line in enumerate(f, start=1):
            fields = line.split()
            if not fields:
                continue
            if fields[0] == "centroid":
                if len(fields) != 6:
                    raise ValueError(f"manifest line {lineno}: malformed centroid")
                cents.append([float(v) for v in fields[2:5]])
                files.append(fields[5])
            elif len(fields) == 2:
                meta[fields[0]] = fields[1]
            else:
                raise ValueError(f"manifest line {lineno}: cannot parse {line.strip()!r}")
    parts = [read_ply(os.path.join(directory, name)) for name in files]
    labels = np.concatenate([np.full(len(p), h, dtype=np.intp) for h, p in enumerate(parts)])
    return ClusterSet(
        np.concatenate(parts),
        labels,
        np.asarray(cents),
        int(meta.get("iterations", 0)),
        float(meta.get("objective", 0.0)),
        bool(int(meta.get("converged", 1))),
    )
