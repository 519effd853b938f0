"""Cluster-wise blending and style transfer for large clouds.

Large clouds are split into equal-size clusters, each cluster pair is blended
by an embedder, and the results are reassembled. Only ``X`` is clustered with
k-means; ``Y`` is assigned to ``X``'s centroids so that cluster ``i`` of both
clouds covers the same region. :func:`naive_match_blend` clusters both clouds
independently and pairs clusters greedily, which is what goes wrong without
shared centroids.

All pipelines work on clouds normalized to the unit cube and map the result
back into the original frame. Two clouds being blended share one transform,
fitted to their union, so that both endpoints of a blend come back exactly.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import config
from .cluster import ClusterSet, assign_to_shared_centroids, constrained_kmeans
from .core import as_cloud, derive_seed, normalize_unit_cube
from .density import style_source
from .embed import OTEmbedder


@dataclass(frozen=True)
class BlendResult:
    """Blended cloud plus the intermediate clusterings (normalized frame)."""

    points: np.ndarray
    lam: float
    x_clusters: ClusterSet
    y_clusters: ClusterSet
    pairing: tuple
    style_source: np.ndarray = None


def _check_sizes(x, y, k):
    if len(x) != len(y):
        raise ValueError(f"clouds must have equal sizes, got {len(x)} and {len(y)}")
    if k < 1 or len(x) % k:
        raise ValueError(f"cannot split n={len(x)} points into k={k} equal clusters")


def _joint_normalize(x, y):
    _, tf = normalize_unit_cube(np.vstack([x, y]))
    return np.clip(tf.apply(x), 0.0, 1.0), np.clip(tf.apply(y), 0.0, 1.0), tf


def _blend_pairs(xcs, ycs, pairing, lams, embedder, workers):
    def one(i):
        return embedder.blend_many(xcs.cluster(i), ycs.cluster(pairing[i]), lams)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_cluster = list(pool.map(one, range(xcs.k)))
    else:
        per_cluster = [one(i) for i in range(xcs.k)]
    return [np.concatenate([pc[j] for pc in per_cluster]) for j in range(len(lams))]


def _sweep(tf, xcs, ycs, pairing, lams, embedder, workers, s_n=None):
    blended = _blend_pairs(xcs, ycs, pairing, lams, embedder, workers)
    src = None if s_n is None else tf.inverse(s_n)
    return [
        BlendResult(tf.inverse(z), float(lam), xcs, ycs, tuple(pairing), src)
        for z, lam in zip(blended, lams)
    ]


def blend_sweep(x, y, lams, k, embedder=None, seed=config.DEFAULT_SEED,
                max_iters=config.KMEANS_MAX_ITERS, workers=1):
    """Blend ``x`` towards ``y`` for every ``lam`` in ``lams``.

    Clustering and matching are computed once and shared by the whole sweep.
    """
    x = as_cloud(x, "X")
    y = as_cloud(y, "Y")
    _check_sizes(x, y, k)
    embedder = embedder or OTEmbedder()
    xn, yn, tf = _joint_normalize(x, y)
    xcs = constrained_kmeans(xn, k, seed=seed, max_iters=max_iters)
    ycs = assign_to_shared_centroids(yn, xcs)
    return _sweep(tf, xcs, ycs, list(range(k)), list(lams), embedder, workers)


def blend_pipeline(x, y, lam, k, embedder=None, seed=config.DEFAULT_SEED, **kwargs):
    """Blend two equal-size clouds cluster by cluster with shared centroids."""
    return blend_sweep(x, y, [lam], k, embedder, seed, **kwargs)[0]


def style_transfer_sweep(x, design, lams, k, embedder=None, bandwidth=config.KDE_BANDWIDTH,
                         seed=config.DEFAULT_SEED, noise_sigma=config.NOISE_SIGMA,
                         max_iters=config.KMEANS_MAX_ITERS, workers=1):
    """Impose the style of ``design`` (unit-cube coordinates) onto ``x``.

    The design is resampled along the density of the normalized ``x`` and the
    two are blended with shared centroids. ``style_source`` in the results is
    that resampled design, mapped into ``x``'s frame.
    """
    x = as_cloud(x, "X")
    design = as_cloud(design, "design")
    if k < 1 or len(x) % k:
        raise ValueError(f"cannot split n={len(x)} points into k={k} equal clusters")
    embedder = embedder or OTEmbedder()
    xn, tf = normalize_unit_cube(x)
    s_n = style_source(xn, design, bandwidth, derive_seed(seed, 1), noise_sigma)
    xcs = constrained_kmeans(xn, k, seed=seed, max_iters=max_iters)
    scs = assign_to_shared_centroids(s_n, xcs)
    return _sweep(tf, xcs, scs, list(range(k)), list(lams), embedder, workers, s_n)


def style_transfer_pipeline(x, design, lam, k, embedder=None, bandwidth=config.KDE_BANDWIDTH,
                            seed=config.DEFAULT_SEED, **kwargs):
    return style_transfer_sweep(x, design, [lam], k, embedder, bandwidth, seed, **kwargs)[0]


def greedy_centroid_matching(centroids_x, centroids_y):
    """Pair each X centroid, in index order, with the nearest unused Y centroid."""
    cx = np.asarray(centroids_x, dtype=np.float64)
    cy = np.asarray(centroids_y, dtype=np.float64)
    d = np.linalg.norm(cx[:, None, :] - cy[None, :, :], axis=-1)
    used = np.zeros(len(cy), dtype=bool)
    pairing = []
    for i in range(len(cx)):
        row = np.where(used, np.inf, d[i])
        j = int(np.argmin(row))
        used[j] = True
        pairing.append(j)
    return pairing


def naive_match_blend(x, y, lam, k, embedder=None, seed=config.DEFAULT_SEED, seed_y=None,
                      max_iters=config.KMEANS_MAX_ITERS, workers=1):
    """Blend after clustering both clouds independently.

    Clusters are paired by nearest centroid without reuse. This can pair
    clusters from distant regions and is kept for comparison only.
    """
    x = as_cloud(x, "X")
    y = as_cloud(y, "Y")
    _check_sizes(x, y, k)
    embedder = embedder or OTEmbedder()
    if seed_y is None:
        seed_y = derive_seed(seed, 2)
    xn, yn, tf = _joint_normalize(x, y)
    xcs = constrained_kmeans(xn, k, seed=seed, max_iters=max_iters)
    ycs = constrained_kmeans(yn, k, seed=seed_y, max_iters=max_iters)
    pairing = greedy_centroid_matching(xcs.centroids, ycs.centroids)
    return _sweep(tf, xcs, ycs, pairing, [lam], embedder, workers)[0]


def blend_latents(latents_a, latents_b, lam, decoder):
    """Decode ``lam * a_i + (1 - lam) * b_i`` per cluster and reassemble.

    For latents produced outside this package, one per cluster of ``X`` and
    of the shared-centroid clustering of ``Y``; ``decoder`` maps a latent to
    a cluster (e.g. :meth:`PcaEmbedder.decode`).
    """
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must lie in [0, 1], got {lam}")
    if len(latents_a) != len(latents_b):
        raise ValueError(f"got {len(latents_a)} and {len(latents_b)} latents")
    parts = []
    for za, zb in zip(latents_a, latents_b):
        za = np.asarray(za, dtype=np.float64)
        zb = np.asarray(zb, dtype=np.float64)
        if za.shape != zb.shape:
            raise ValueError(f"latent shapes differ: {za.shape} vs {zb.shape}")
        parts.append(as_cloud(decoder(lam * za + (1.0 - lam) * zb)))
    return np.concatenate(parts)
