import numpy as np
import pytest

from conftest import brute_emd, multiset_close
from pcblend.embed import (ExternalEmbedder, OTEmbedder, PcaEmbedder, PcaModel, canonical_order,
                           load_latent, pca_fit, save_latent)
from pcblend.metrics import emd_exact


def test_ot_single_point_midpoint():
    out = OTEmbedder().blend([[0, 0, 0]], [[1, 0, 0]], 0.5)
    np.testing.assert_array_equal(out, [[0.5, 0, 0]])


def test_ot_endpoints_and_self(rng):
    e = OTEmbedder()
    x, y = rng.random((30, 3)), rng.random((30, 3))
    np.testing.assert_array_equal(e.blend(x, y, 1.0), x)
    assert multiset_close(e.blend(x, y, 0.0), y, atol=0)
    for lam in (0.0, 0.3, 1.0):
        np.testing.assert_allclose(e.blend(x, x, lam), x, rtol=0, atol=1e-15)
    np.testing.assert_array_equal(e.reconstruct(x), x)
    assert multiset_close(e.decode(e.encode(x)), x, atol=0)


@pytest.mark.parametrize("seed", range(5))
def test_ot_midpoints_of_optimal_matching(seed):
    rng = np.random.default_rng(seed)
    x, y = rng.random((3, 3)), rng.random((3, 3))
    _, perm = brute_emd(x, y)
    np.testing.assert_allclose(OTEmbedder().blend(x, y, 0.5), 0.5 * (x + y[perm]), atol=1e-15)


@pytest.mark.parametrize("seed", range(5))
def test_ot_displacement_additivity(seed):
    rng = np.random.default_rng(seed)
    x, y = rng.random((6, 3)), rng.random((6, 3))
    z = OTEmbedder().blend(x, y, 0.5)
    total = brute_emd(x, z)[0] + brute_emd(z, y)[0]
    assert abs(total - brute_emd(x, y)[0]) <= 1e-7


def test_ot_points_on_segments_and_box(rng):
    e = OTEmbedder()
    x, y = rng.random((40, 3)), rng.random((40, 3)) + 1
    perm = e.matching(x, y)
    z = e.blend(x, y, 0.3)
    seg = y[perm] - x
    t = ((z - x) * seg).sum(1) / (seg * seg).sum(1)
    np.testing.assert_allclose(t, 0.7)
    np.testing.assert_allclose(x + t[:, None] * seg, z, atol=1e-12)
    lo = np.minimum(x.min(0), y.min(0))
    hi = np.maximum(x.max(0), y.max(0))
    assert np.all(z >= lo - 1e-12) and np.all(z <= hi + 1e-12)


def test_blend_errors(rng):
    e = OTEmbedder()
    with pytest.raises(ValueError):
        e.blend(rng.random((3, 3)), rng.random((4, 3)), 0.5)
    with pytest.raises(ValueError):
        e.blend(rng.random((3, 3)), rng.random((3, 3)), 1.5)
    big = np.zeros((e.max_points + 1, 3))
    with pytest.raises(ValueError, match="cluster"):
        e.matching(big, big)


def test_canonical_order():
    pts = np.array([[1, 0, 0], [0, 1, 0], [0, 0, 1], [0, 0, 0]])
    np.testing.assert_array_equal(canonical_order(pts), [3, 2, 1, 0])


def test_pca_constant_training_set(rng):
    c = rng.random((8, 3))
    model = pca_fit([c[rng.permutation(8)] for _ in range(5)], d=0)
    np.testing.assert_allclose(model.mean, c[canonical_order(c)].ravel())
    e = PcaEmbedder(model)
    assert multiset_close(e.reconstruct(c), c, atol=1e-12)


def test_pca_full_rank_exact(rng):
    clusters = [rng.random((4, 3)) for _ in range(20)]
    model = pca_fit(clusters, d=12)
    e = PcaEmbedder(model)
    for c in clusters[:5]:
        assert multiset_close(e.reconstruct(c), c, atol=1e-6)
    np.testing.assert_allclose(model.basis @ model.basis.T, np.eye(12), atol=1e-8)


def test_pca_error_matches_eigendecomposition(rng):
    clusters = [rng.random((8, 3)) for _ in range(20)]
    e = PcaEmbedder(pca_fit(clusters, d=5))
    data = np.array([c[canonical_order(c)].ravel() for c in clusters])
    mean = data.mean(0)
    vals, vecs = np.linalg.eigh((data - mean).T @ (data - mean))
    top = vecs[:, np.argsort(vals)[::-1][:5]]
    want = sum(np.sum(((data[i] - mean) - top @ (top.T @ (data[i] - mean))) ** 2)
               for i in range(20))
    got = sum(np.sum((e.decode(e.encode(c)).ravel() - data[i]) ** 2)
              for i, c in enumerate(clusters))
    assert got == pytest.approx(want, rel=1e-9)
    errors = []
    for d in range(0, 8):
        ed = PcaEmbedder(pca_fit(clusters, d))
        errors.append(sum(np.sum((ed.decode(ed.encode(c)).ravel() - data[i]) ** 2)
                          for i, c in enumerate(clusters)))
    assert np.all(np.diff(errors) <= 1e-12)


def test_pca_errors_and_idempotence(rng):
    clusters = [rng.random((8, 3)) for _ in range(6)]
    with pytest.raises(ValueError):
        pca_fit(clusters, d=7)
    with pytest.raises(ValueError):
        pca_fit([rng.random((8, 3)), rng.random((7, 3))], d=1)
    e = PcaEmbedder(pca_fit(clusters, d=4))
    z = rng.normal(size=4) * 0.01
    np.testing.assert_allclose(e.encode(e.decode(z)), z, atol=1e-8)
    x, y = clusters[0], clusters[1]
    np.testing.assert_allclose(e.blend(x, y, 1.0), e.reconstruct(x))
    np.testing.assert_allclose(e.blend(x, y, 0.0), e.reconstruct(y))
    with pytest.raises(ValueError):
        e.encode(rng.random((5, 3)))


def test_pca_model_file_round_trip(tmp_path, rng):
    model = pca_fit([rng.random((8, 3)) for _ in range(10)], d=3)
    model.save(tmp_path / "m.pca")
    back = PcaModel.load(tmp_path / "m.pca")
    np.testing.assert_array_equal(back.mean, model.mean)
    np.testing.assert_array_equal(back.basis, model.basis)
    data = (tmp_path / "m.pca").read_bytes()
    (tmp_path / "bad.pca").write_bytes(data[:-1])
    with pytest.raises(ValueError, match="bytes"):
        PcaModel.load(tmp_path / "bad.pca")


def test_latent_round_trip_and_truncation(tmp_path, rng):
    z = rng.normal(size=512)
    save_latent(z, tmp_path / "z.bin")
    np.testing.assert_array_equal(load_latent(tmp_path / "z.bin"), z)
    assert (tmp_path / "z.bin").stat().st_size == 4 + 8 * 512
    (tmp_path / "t.bin").write_bytes((tmp_path / "z.bin").read_bytes()[:100])
    with pytest.raises(ValueError, match="4100.*100"):
        load_latent(tmp_path / "t.bin")
    (tmp_path / "h.bin").write_bytes(b"\x01")
    with pytest.raises(ValueError):
        load_latent(tmp_path / "h.bin")


def test_external_blend_is_linear_decode(rng):
    e = PcaEmbedder(pca_fit([rng.random((8, 3)) for _ in range(10)], d=4))
    za, zb = rng.normal(size=4), rng.normal(size=4)
    ext = ExternalEmbedder(e.encode, e.decode)
    np.testing.assert_allclose(ext.decode(0.5 * za + 0.5 * zb), e.decode((za + zb) / 2))
    x, y = rng.random((8, 3)), rng.random((8, 3))
    np.testing.assert_allclose(ext.blend(x, y, 0.25), e.blend(x, y, 0.25))
