"""Embedders: encode a cluster to a latent vector, decode it back, blend.

An embedder plays the role of an autoencoder ``f = decode . encode``. Blending
two clouds means decoding ``lam * encode(X) + (1 - lam) * encode(Y)``.

Two reference embedders are provided. :class:`OTEmbedder` blends by moving
each point along its optimal-transport match, so both endpoints are exact.
:class:`PcaEmbedder` is a linear model over canonically ordered clusters.
:class:`ExternalEmbedder` wraps arbitrary encode/decode callables, e.g. a
separately trained network.
"""

import struct

import numpy as np

from . import config
from .core import as_cloud
from .metrics import emd_exact


def _check_lambda(lam):
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must lie in [0, 1], got {lam}")


def canonical_order(points):
    """Indices sorting points lexicographically by (x, y, z)."""
    pts = np.asarray(points)
    return np.lexsort((pts[:, 2], pts[:, 1], pts[:, 0]))


class Embedder:
    """Base class; subclasses implement :meth:`encode` and :meth:`decode`."""

    def encode(self, points):
        raise NotImplementedError

    def decode(self, latent):
        raise NotImplementedError

    def reconstruct(self, points):
        return self.decode(self.encode(points))

    def blend(self, x, y, lam):
        _check_lambda(lam)
        x = as_cloud(x, "X")
        y = as_cloud(y, "Y")
        if len(x) != len(y):
            raise ValueError(f"cannot blend clouds of sizes {len(x)} and {len(y)}")
        return self.decode(lam * self.encode(x) + (1.0 - lam) * self.encode(y))

    def blend_many(self, x, y, lams):
        return [self.blend(x, y, lam) for lam in lams]


class OTEmbedder(Embedder):
    """Displacement interpolation along an exact optimal matching.

    ``encode`` flattens the canonically ordered points (latent size ``3n``)
    and ``decode`` reshapes, so reconstruction is exact. ``blend`` moves every
    ``x`` towards its matched ``y = phi(x)``: ``lam * x + (1 - lam) * phi(x)``.
    """

    max_points = 4096

    def encode(self, points):
        pts = as_cloud(points)
        return pts[canonical_order(pts)].ravel()

    def decode(self, latent):
        return np.asarray(latent, dtype=np.float64).reshape(-1, 3)

    def reconstruct(self, points):
        return as_cloud(points).copy()

    def matching(self, x, y):
        """Permutation ``perm`` with ``x[i]`` matched to ``y[perm[i]]``."""
        x = as_cloud(x, "X")
        y = as_cloud(y, "Y")
        if len(x) != len(y):
            raise ValueError(f"cannot blend clouds of sizes {len(x)} and {len(y)}")
        if len(x) > self.max_points:
            raise ValueError(
                f"exact matching limited to {self.max_points} points, got {len(x)}; cluster first"
            )
        return emd_exact(x, y)[1]

    def blend(self, x, y, lam):
        return self.blend_many(x, y, [lam])[0]

    def blend_many(self, x, y, lams):
        for lam in lams:
            _check_lambda(lam)
        x = as_cloud(x, "X")
        y = as_cloud(y, "Y")
        target = y[self.matching(x, y)]
        return [lam * x + (1.0 - lam) * target for lam in lams]


class PcaModel:
    """Mean and orthonormal basis over flattened, canonically ordered clusters."""

    MAGIC = b"PCBPCA01"

    def __init__(self, mean, basis):
        self.mean = np.asarray(mean, dtype=np.float64).ravel()
        self.basis = np.asarray(basis, dtype=np.float64).reshape(-1, len(self.mean))
        if len(self.mean) % 3:
            raise ValueError("mean length must be a multiple of 3")

    @property
    def m(self):
        return len(self.mean) // 3

    @property
    def d(self):
        return len(self.basis)

    def save(self, path):
        with open(path, "wb") as f:
            f.write(self.MAGIC)
            f.write(struct.pack("<II", self.m, self.d))
            f.write(self.mean.astype("<f8").tobytes())
            f.write(self.basis.astype("<f8").tobytes())

    @classmethod
    def load(cls, path):
        with open(path, "rb") as f:
            data = f.read()
        head = len(cls.MAGIC) + 8
        if len(data) < head or not data.startswith(cls.MAGIC):
            raise ValueError(f"{path}: not a PCA model file")
        m, d = struct.unpack_from("<II", data, len(cls.MAGIC))
        expected = head + 8 * 3 * m * (1 + d)
        if len(data) != expected:
            raise ValueError(f"{path}: expected {expected} bytes, got {len(data)}")
        vals = np.frombuffer(data, dtype="<f8", offset=head).astype(np.float64)
        return cls(vals[: 3 * m], vals[3 * m:].reshape(d, 3 * m))


def _flatten_clusters(clusters):
    rows = []
    m = None
    for c in clusters:
        c = as_cloud(c, "cluster")
        if m is None:
            m = len(c)
        elif len(c) != m:
            raise ValueError(f"all clusters must have {m} points, got {len(c)}")
        rows.append(c[canonical_order(c)].ravel())
    if not rows:
        raise ValueError("no training clusters")
    return np.asarray(rows)


def pca_fit(clusters, d=config.LATENT_DIM):
    """Fit a :class:`PcaModel` with ``d`` principal directions."""
    data = _flatten_clusters(clusters)
    count, dim = data.shape
    if d < 0 or d > dim:
        raise ValueError(f"latent size d={d} must lie in [0, {dim}]")
    if count < d:
        raise ValueError(f"need at least d={d} training clusters, got {count}")
    mean = data.mean(axis=0)
    _, _, vt = np.linalg.svd(data - mean, full_matrices=False)
    return PcaModel(mean, vt[:d])


class PcaEmbedder(Embedder):
    def __init__(self, model):
        self.model = model

    def encode(self, points):
        pts = as_cloud(points)
        if len(pts) != self.model.m:
            raise ValueError(f"model expects clusters of {self.model.m} points, got {len(pts)}")
        flat = pts[canonical_order(pts)].ravel()
        return self.model.basis @ (flat - self.model.mean)

    def decode(self, latent):
        z = np.asarray(latent, dtype=np.float64)
        return (self.model.mean + z @ self.model.basis).reshape(-1, 3)


class ExternalEmbedder(Embedder):
    """Adapter around user-supplied ``encode_fn`` / ``decode_fn`` callables."""

    def __init__(self, encode_fn, decode_fn):
        self.encode_fn = encode_fn
        self.decode_fn = decode_fn

    def encode(self, points):
        return np.asarray(self.encode_fn(as_cloud(points)), dtype=np.float64)

    def decode(self, latent):
        return as_cloud(self.decode_fn(np.asarray(latent, dtype=np.float64)))


def save_latent(latent, path):
    """Little-endian ``u32 d`` followed by ``d`` float64 values."""
    z = np.asarray(latent, dtype=np.float64).ravel()
    with open(path, "wb") as f:
        f.write(struct.pack("<I", len(z)))
        f.write(z.astype("<f8").tobytes())


def load_latent(path):
    with open(path, "rb") as f:
        data = f.read()
    if len(data) < 4:
        raise ValueError(f"{path}: header needs 4 bytes, got {len(data)}")
    (d,) = struct.unpack_from("<I", data)
    expected = 4 + 8 * d
    if len(data) != expected:
        raise ValueError(f"{path}: expected {expected} bytes for d={d}, got {len(data)}")
    return np.frombuffer(data, dtype="<f8", offset=4).astype(np.float64)
