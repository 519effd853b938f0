import itertools

import numpy as np
import pytest


def multiset_close(a, b, atol=1e-9):
    """Equal as multisets up to ``atol`` per coordinate after sorting."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        return False
    sa = a[np.lexsort(a.T[::-1])]
    sb = b[np.lexsort(b.T[::-1])]
    return bool(np.max(np.abs(sa - sb), initial=0.0) <= atol)


def brute_emd(x, y):
    """Minimum over all permutations of the summed Euclidean matching cost."""
    d = np.linalg.norm(x[:, None] - y[None], axis=-1)
    n = len(x)
    best = np.inf
    best_perm = None
    for perm in itertools.permutations(range(n)):
        c = d[np.arange(n), perm].sum()
        if c < best:
            best, best_perm = c, np.array(perm)
    return best, best_perm


def brute_balanced(points, centroids, m):
    """Minimum of sum 0.5 |x - c|^2 over all balanced labelings (small n only)."""
    k = len(centroids)
    n = len(points)
    cost = 0.5 * ((points[:, None] - centroids[None]) ** 2).sum(-1)
    labels = np.array(list(itertools.product(range(k), repeat=n)), dtype=np.int8)
    counts = np.stack([(labels == h).sum(1) for h in range(k)], axis=1)
    labels = labels[np.all(counts == m, axis=1)]
    totals = cost[np.arange(n), labels].sum(1)
    i = int(np.argmin(totals))
    return totals[i], labels[i].astype(int)


def brute_chamfer(x, y):
    """O(n m) Chamfer over the full squared-distance table."""
    diff = x[:, None, :] - y[None, :, :]
    d2 = np.einsum("ijd,ijd->ij", diff, diff)
    return float(d2.min(axis=1).sum() + d2.min(axis=0).sum())


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def four_blobs(n=1024, seed=0, side=0.05):
    """Square blobs at the xy corners 0.1/0.9 of the plane z = 0.5.

    The blobs are ordered (0.1, 0.1), (0.1, 0.9), (0.9, 0.1), (0.9, 0.9),
    ``n // 4`` points each. Balanced 2-means can split them left/right or
    bottom/top depending on the seed.
    """
    rng = np.random.default_rng(seed)
    q = n // 4
    corners = np.array([[0.1, 0.1], [0.1, 0.9], [0.9, 0.1], [0.9, 0.9]])
    return np.concatenate([
        np.column_stack([c + side * (rng.random((q, 2)) - 0.5), np.full(q, 0.5)])
        for c in corners
    ])


def split_kind(labels):
    """'lr' for a left/right split of :func:`four_blobs`, 'tb' for top/bottom."""
    q = len(labels) // 4
    blob = labels[[0, q, 2 * q, 3 * q]]
    if blob[0] == blob[1] and blob[2] == blob[3] and blob[0] != blob[2]:
        return "lr"
    if blob[0] == blob[2] and blob[1] == blob[3] and blob[0] != blob[1]:
        return "tb"
    return None


ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[key])
