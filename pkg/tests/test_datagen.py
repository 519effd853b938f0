import time

import numpy as np
import pytest

from pcblend.datagen import (DESIGN_KINDS, SHAPE_KINDS, WALL_BOX, box_faces, bridge_mask,
                             cuts_mask, gen_dataset, gen_design, gen_fixture, gen_shape,
                             lattice_nodes, porous_mask, sphere_shells, stripes_mask)


def in_cube(p):
    return np.all(p >= 0) and np.all(p <= 1)


def test_single_shell_radius():
    pts = gen_shape("spheres", 10_000, {"radii": [0.4]}, seed=1)
    np.testing.assert_allclose(np.linalg.norm(pts - 0.5, axis=1), 0.4, atol=1e-9)
    assert in_cube(pts)


def test_two_shells_area_split():
    n = 20_000
    pts = gen_shape("spheres", n, {"radii": [0.2, 0.4]}, seed=2)
    r = np.linalg.norm(pts - 0.5, axis=1)
    inner = np.sum(np.isclose(r, 0.2, atol=1e-9))
    assert inner + np.sum(np.isclose(r, 0.4, atol=1e-9)) == n
    a1, a2 = 4 * np.pi * 0.2**2, 4 * np.pi * 0.4**2
    p = a1 / (a1 + a2)
    assert abs(inner - n * p) <= 3 * np.sqrt(n * p * (1 - p))


def test_cuboids_on_faces():
    half = [[0.4, 0.3, 0.2], [0.2, 0.15, 0.1]]
    pts = gen_shape("cuboids", 5000, {"half_extents": half}, seed=3)
    planes = [(ax, 0.5 + s * h[ax]) for h in half for ax in range(3) for s in (-1, 1)]
    assert len(planes) == 12
    on = np.zeros(len(pts), dtype=bool)
    for ax, v in planes:
        on |= np.abs(pts[:, ax] - v) <= 1e-9
    assert on.all()
    assert len(box_faces(half[0])) == 6


def test_planes_and_lattice_constraints():
    pts = gen_shape("planes", 3000, {"planes": [(0, 0.3), (2, 0.7)]}, seed=4)
    assert np.all((np.abs(pts[:, 0] - 0.3) < 1e-12) | (np.abs(pts[:, 2] - 0.7) < 1e-12))
    lat = gen_shape("lattice", 3000, {"pitch": 0.3, "radius": 0.03}, seed=5)
    assert in_cube(lat)
    nodes = lattice_nodes(0.3, 0.03)
    # every point is at strut radius from some grid line and inside none
    d = np.full(len(lat), np.inf)
    for ax in range(3):
        u, v = [a for a in range(3) if a != ax]
        du = lat[:, u][:, None, None] - nodes[None, :, None]
        dv = lat[:, v][:, None, None] - nodes[None, None, :]
        d = np.minimum(d, np.sqrt(du**2 + dv**2).min(axis=(1, 2)))
    np.testing.assert_allclose(d, 0.03, atol=1e-9)
    with pytest.raises(ValueError):
        gen_shape("lattice", 10, {"pitch": 1.5, "radius": 0.03})
    with pytest.raises(ValueError):
        gen_shape("spheres", 10, {"radii": []})


def test_shapes_random_params_in_cube():
    for kind in SHAPE_KINDS:
        for seed in range(5):
            pts = gen_shape(kind, 500, seed=seed)
            assert pts.shape == (500, 3) and in_cube(pts)
            np.testing.assert_array_equal(pts, gen_shape(kind, 500, seed=seed))


def test_porous_zero_voids_uniform_octants():
    n = 16_000
    pts = gen_design("porous", n, {"voids": []}, seed=1)
    octant = (pts > 0.5).astype(int) @ [1, 2, 4]
    counts = np.bincount(octant, minlength=8)
    p = 1 / 8
    assert np.all(np.abs(counts - n * p) <= 3 * np.sqrt(n * p * (1 - p)))


def test_porous_void_is_empty():
    pts = gen_design("porous", 5000, {"voids": [((0.5, 0.5, 0.5), 0.3)]}, seed=2)
    assert np.all(np.linalg.norm(pts - 0.5, axis=1) >= 0.3)


def test_stripes_slabs_and_volume_fraction():
    params = {"period": 0.1, "thickness": 0.04, "amplitude": 0.05, "wavelength": 0.25, "axis": 0}
    pts = gen_design("stripes", 5000, params, seed=3)
    assert stripes_mask(pts, **params).all()
    # the zig-zag shifts whole columns, so each column keeps exactly t / p of the period
    n = 200_000
    u = np.random.default_rng(0).random((n, 3))
    frac = stripes_mask(u, **params).mean()
    p = 0.04 / 0.1
    assert abs(frac - p) <= 3 * np.sqrt(p * (1 - p) / n)


def test_cuts_and_design_kinds():
    slit = (0, 0.5, 0.1, 0.2, 0.8)
    pts = gen_design("cuts", 5000, {"slits": [slit]}, seed=4)
    assert cuts_mask(pts, [slit]).all()
    assert not cuts_mask(np.array([[0.5, 0.5, 0.5]]), [slit])[0]
    for kind in DESIGN_KINDS:
        d = gen_design(kind, 2000, seed=1)
        assert d.shape == (2000, 3) and in_cube(d)
        np.testing.assert_array_equal(d, gen_design(kind, 2000, seed=1))
    with pytest.raises(ValueError):
        gen_design("stripes", 10, {"period": 0.1, "thickness": 0.2, "amplitude": 0,
                                   "wavelength": 1, "axis": 0})
    with pytest.raises(ValueError):
        gen_design("waves", 10)
    assert porous_mask(np.array([[0.0, 0, 0]]), []).all()


def test_dataset_round_robin_and_determinism():
    ds = gen_dataset(4, 256, seed=7)
    assert [c.kind for c in ds] == list(SHAPE_KINDS)
    again = gen_dataset(4, 256, seed=7)
    for a, b in zip(ds, again):
        np.testing.assert_array_equal(a.points, b.points)
        assert a.params == b.params and a.seed == b.seed


def test_dataset_speed():
    t0 = time.perf_counter()
    ds = gen_dataset(40, 4096, seed=0)
    assert time.perf_counter() - t0 < 30
    assert {c.kind for c in ds} == set(SHAPE_KINDS)
    assert all(c.points.shape == (4096, 3) and in_cube(c.points) for c in ds)


def test_fixtures():
    wall = gen_fixture("wall", 1000, seed=1)
    assert np.all(wall >= WALL_BOX[0]) and np.all(wall <= WALL_BOX[1])
    bridge = gen_fixture("bridge", 4000, seed=2)
    assert bridge_mask(bridge).all() and in_cube(bridge)
    assert gen_fixture("pillar", 1000).shape == (1000, 3)
    with pytest.raises(ValueError):
        gen_fixture("tower", 10)
    with pytest.raises(ValueError):
        sphere_shells([0.6], 10, np.random.default_rng(0))
