"""Synthetic clouds in the unit cube.

* Training shapes (surface samples): encapsulated spheres, encapsulated
  cuboids, orthogonally intersecting planes and strut lattices.
* Design clouds (volume samples): stripes, porous, cuts.
* Test fixtures (volume samples): wall, bridge, pillar.

Every generator is a pure function of its parameters and seed.
"""

from dataclasses import dataclass

import numpy as np

from .core import derive_seed, make_rng

SHAPE_KINDS = ("spheres", "cuboids", "planes", "lattice")
DESIGN_KINDS = ("stripes", "porous", "cuts")
FIXTURE_KINDS = ("wall", "bridge", "pillar")

CENTER = np.array([0.5, 0.5, 0.5])


def _check_count(points):
    if int(points) < 1:
        raise ValueError(f"points must be positive, got {points}")
    return int(points)


def _split_counts(weights, n, rng):
    w = np.asarray(weights, dtype=np.float64)
    return rng.multinomial(n, w / w.sum())


# -- surfaces ------------------------------------------------------------------


def sphere_shells(radii, n, rng, center=CENTER):
    """Uniform samples on concentric spheres, area-weighted across shells."""
    radii = np.asarray(radii, dtype=np.float64)
    if radii.size == 0 or np.any(radii <= 0):
        raise ValueError("need at least one positive radius")
    center = np.asarray(center, dtype=np.float64)
    if np.any(center - radii.max() < 0) or np.any(center + radii.max() > 1):
        raise ValueError("spheres must fit inside the unit cube")
    counts = _split_counts(radii**2, n, rng)
    parts = []
    for r, c in zip(radii, counts):
        v = rng.normal(size=(c, 3))
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        parts.append(center + r * v)
    return np.concatenate(parts)


def box_faces(half_extents):
    """(axis, sign, face area) for the 6 faces of a centred box."""
    a = np.asarray(half_extents, dtype=np.float64)
    faces = []
    for axis in range(3):
        u, v = [ax for ax in range(3) if ax != axis]
        for sign in (-1.0, 1.0):
            faces.append((axis, sign, 4.0 * a[u] * a[v]))
    return faces


def box_surfaces(half_extents, n, rng, center=CENTER):
    """Uniform samples on the faces of nested axis-aligned boxes."""
    boxes = np.atleast_2d(np.asarray(half_extents, dtype=np.float64))
    if boxes.shape[0] == 0 or boxes.shape[1] != 3 or np.any(boxes <= 0):
        raise ValueError("need at least one box with positive half extents")
    if np.any(boxes > 0.5):
        raise ValueError("boxes must fit inside the unit cube")
    faces = [(b, f) for b in range(len(boxes)) for f in box_faces(boxes[b])]
    counts = _split_counts([f[2] for _, f in faces], n, rng)
    parts = []
    for (b, (axis, sign, _)), c in zip(faces, counts):
        a = boxes[b]
        p = rng.uniform(-1.0, 1.0, size=(c, 3)) * a
        p[:, axis] = sign * a[axis]
        parts.append(center + p)
    return np.concatenate(parts)


def axis_planes(planes, n, rng):
    """Uniform samples on full unit squares ``{p : p[axis] == offset}``."""
    if len(planes) == 0:
        raise ValueError("need at least one plane")
    counts = _split_counts(np.ones(len(planes)), n, rng)
    parts = []
    for (axis, offset), c in zip(planes, counts):
        if axis not in (0, 1, 2) or not 0 <= offset <= 1:
            raise ValueError(f"invalid plane ({axis}, {offset})")
        p = rng.random((c, 3))
        p[:, axis] = offset
        parts.append(p)
    return np.concatenate(parts)


def lattice_nodes(pitch, radius):
    """Grid coordinates along one axis, centred in the cube."""
    span = 1.0 - 2.0 * radius
    if not 0 < pitch <= span:
        raise ValueError(f"pitch {pitch} must lie in (0, {span}] for strut radius {radius}")
    cells = int(np.floor(span / pitch + 1e-12))
    start = radius + (span - cells * pitch) / 2.0
    return start + pitch * np.arange(cells + 1)


def _strut_distance(points, nodes, cross_section):
    """Distance from each point to the nearest strut axis (Euclidean or Chebyshev)."""
    best = np.full(len(points), np.inf)
    for ax in range(3):
        u, v = [a for a in range(3) if a != ax]
        du = np.abs(points[:, u, None] - nodes[None, :]).min(axis=1)
        dv = np.abs(points[:, v, None] - nodes[None, :]).min(axis=1)
        d = np.hypot(du, dv) if cross_section == "circle" else np.maximum(du, dv)
        best = np.minimum(best, d)
    return best


def _strut_samples(nodes, pitch, radius, n, rng, cross_section):
    m = len(nodes)
    # every strut has length pitch and equal area, so pick them uniformly
    axis = rng.integers(3, size=n)
    seg = rng.integers(m - 1, size=n)
    iu = rng.integers(m, size=n)
    iv = rng.integers(m, size=n)
    t = nodes[seg] + pitch * rng.random(n)
    if cross_section == "circle":
        theta = rng.uniform(0.0, 2.0 * np.pi, size=n)
        du, dv = radius * np.cos(theta), radius * np.sin(theta)
    else:
        side = rng.integers(4, size=n)
        s = rng.uniform(-radius, radius, size=n)
        du = np.where(side == 0, radius, np.where(side == 1, -radius, s))
        dv = np.where(side == 2, radius, np.where(side == 3, -radius, s))
    pts = np.empty((n, 3))
    for ax in range(3):
        u, v = [a for a in range(3) if a != ax]
        sel = axis == ax
        pts[sel, ax] = t[sel]
        pts[sel, u] = nodes[iu[sel]] + du[sel]
        pts[sel, v] = nodes[iv[sel]] + dv[sel]
    return pts


def lattice_struts(pitch, radius, n, rng, cross_section="circle"):
    """Samples on the outer surface of a cubic strut lattice.

    Lateral strut surfaces are sampled uniformly; samples that fall inside a
    crossing strut near a joint are rejected.
    """
    if radius <= 0:
        raise ValueError("strut radius must be positive")
    if cross_section not in ("circle", "square"):
        raise ValueError(f"unknown cross section {cross_section!r}")
    nodes = lattice_nodes(pitch, radius)
    parts = []
    have = 0
    while have < n:
        cand = _strut_samples(nodes, pitch, radius, max(256, int(1.3 * (n - have))), rng,
                              cross_section)
        cand = cand[_strut_distance(cand, nodes, cross_section) >= radius * (1 - 1e-12)]
        parts.append(cand)
        have += len(cand)
    return np.concatenate(parts)[:n]


def random_shape_params(kind, rng):
    if kind == "spheres":
        count = int(rng.integers(1, 5))
        return {"radii": sorted(rng.uniform(0.08, 0.48, size=count).round(4).tolist())}
    if kind == "cuboids":
        count = int(rng.integers(1, 4))
        outer = rng.uniform(0.25, 0.5, size=3)
        scales = np.sort(rng.uniform(0.3, 1.0, size=count))[::-1]
        return {"half_extents": (scales[:, None] * outer).round(4).tolist()}
    if kind == "planes":
        planes = [(ax, round(float(rng.uniform(0.2, 0.8)), 4)) for ax in range(3)]
        for _ in range(int(rng.integers(0, 4))):
            planes.append((int(rng.integers(3)), round(float(rng.uniform(0.05, 0.95)), 4)))
        return {"planes": planes}
    if kind == "lattice":
        radius = round(float(rng.uniform(0.01, 0.04)), 4)
        pitch = round(float(rng.uniform(0.15, 0.45)), 4)
        return {"pitch": pitch, "radius": radius,
                "cross_section": ["circle", "square"][int(rng.integers(2))]}
    raise ValueError(f"unknown shape kind {kind!r}; expected one of {SHAPE_KINDS}")


def gen_shape(kind, points, params=None, seed=0):
    """Surface-sampled training shape; ``params=None`` draws random ones."""
    n = _check_count(points)
    rng = make_rng(seed)
    if params is None:
        params = random_shape_params(kind, rng)
    if kind == "spheres":
        return sphere_shells(params["radii"], n, rng, params.get("center", CENTER))
    if kind == "cuboids":
        return box_surfaces(params["half_extents"], n, rng, params.get("center", CENTER))
    if kind == "planes":
        return axis_planes(params["planes"], n, rng)
    if kind == "lattice":
        return lattice_struts(params["pitch"], params["radius"], n, rng,
                              params.get("cross_section", "circle"))
    raise ValueError(f"unknown shape kind {kind!r}; expected one of {SHAPE_KINDS}")


@dataclass(frozen=True)
class GeneratedCloud:
    kind: str
    params: dict
    seed: int
    points: np.ndarray


def gen_dataset(count, points_per_cloud, seed=0):
    """``count`` training shapes, cycling through the four kinds."""
    if count < 1:
        raise ValueError("count must be positive")
    out = []
    for i in range(count):
        kind = SHAPE_KINDS[i % len(SHAPE_KINDS)]
        s = derive_seed(seed, i)
        rng = make_rng(s)
        params = random_shape_params(kind, rng)
        out.append(GeneratedCloud(kind, params, s, gen_shape(kind, points_per_cloud, params, rng)))
    return out


# -- volumes -------------------------------------------------------------------


def _rejection(n, keep, rng, lo=(0, 0, 0), hi=(1, 1, 1)):
    lo = np.asarray(lo, dtype=np.float64)
    hi = np.asarray(hi, dtype=np.float64)
    parts = []
    have = 0
    rate = 0.5
    for _ in range(10000):
        batch = int(max(1024, 1.2 * (n - have) / max(rate, 1e-3)))
        cand = lo + (hi - lo) * rng.random((batch, 3))
        ok = keep(cand)
        rate = max(ok.mean(), 1e-4)
        parts.append(cand[ok])
        have += int(ok.sum())
        if have >= n:
            return np.concatenate(parts)[:n]
    raise ValueError("kept region is (nearly) empty; cannot sample")


def triangle_wave(t):
    """Period-1 zig-zag between 0 and 1."""
    return 2.0 * np.abs(t - np.floor(t + 0.5))


def stripes_mask(points, period=0.1, thickness=0.04, amplitude=0.05, wavelength=0.25, axis=0):
    """True inside the zig-zag slabs of a stripes design."""
    p = np.asarray(points)
    along = p[:, (axis + 2) % 3]
    shifted = p[:, axis] + amplitude * triangle_wave(along / wavelength)
    return np.mod(shifted, period) < thickness


def porous_mask(points, voids):
    p = np.asarray(points)
    keep = np.ones(len(p), dtype=bool)
    for center, radius in voids:
        keep &= np.sum((p - np.asarray(center)) ** 2, axis=1) >= radius**2
    return keep


def cuts_mask(points, slits):
    """False inside any slit ``(axis, offset, width, lo, hi)``.

    A slit is a thin slab ``|p[axis] - offset| < width / 2`` limited to
    ``lo <= p[(axis + 1) % 3] <= hi`` and spanning the third axis.
    """
    p = np.asarray(points)
    keep = np.ones(len(p), dtype=bool)
    for axis, offset, width, lo, hi in slits:
        other = p[:, (axis + 1) % 3]
        inside = (np.abs(p[:, axis] - offset) < width / 2.0) & (other >= lo) & (other <= hi)
        keep &= ~inside
    return keep


def random_design_params(kind, rng):
    if kind == "stripes":
        return {"period": 0.1, "thickness": 0.04, "amplitude": 0.05,
                "wavelength": 0.25, "axis": 0}
    if kind == "porous":
        count = 40
        centers = rng.random((count, 3)).round(4)
        radii = rng.uniform(0.04, 0.1, size=count).round(4)
        return {"voids": [(c.tolist(), float(r)) for c, r in zip(centers, radii)]}
    if kind == "cuts":
        slits = []
        for _ in range(12):
            axis = int(rng.integers(3))
            lo = float(rng.uniform(0.0, 0.5))
            slits.append((axis, round(float(rng.uniform(0.05, 0.95)), 4), 0.03,
                          round(lo, 4), round(lo + float(rng.uniform(0.3, 0.5)), 4)))
        return {"slits": slits}
    raise ValueError(f"unknown design kind {kind!r}; expected one of {DESIGN_KINDS}")


def gen_design(kind, points, params=None, seed=0):
    """Space-filling design cloud sampled uniformly from its solid region."""
    n = _check_count(points)
    rng = make_rng(seed)
    if params is None:
        params = random_design_params(kind, rng)
    if kind == "stripes":
        if not 0 < params["thickness"] <= params["period"]:
            raise ValueError("stripes need 0 < thickness <= period")
        return _rejection(n, lambda p: stripes_mask(p, **params), rng)
    if kind == "porous":
        for _, radius in params["voids"]:
            if radius < 0:
                raise ValueError("void radius must be non-negative")
        return _rejection(n, lambda p: porous_mask(p, params["voids"]), rng)
    if kind == "cuts":
        for slit in params["slits"]:
            if slit[0] not in (0, 1, 2) or slit[2] <= 0:
                raise ValueError(f"invalid slit {slit}")
        return _rejection(n, lambda p: cuts_mask(p, params["slits"]), rng)
    raise ValueError(f"unknown design kind {kind!r}; expected one of {DESIGN_KINDS}")


# -- fixtures ------------------------------------------------------------------

WALL_BOX = ((0.0, 0.45, 0.0), (1.0, 0.55, 0.6))


def _in_box(p, lo, hi):
    return np.all((p >= np.asarray(lo)) & (p <= np.asarray(hi)), axis=1)


def wall_mask(p):
    return _in_box(p, *WALL_BOX)


def bridge_mask(p):
    deck = _in_box(p, (0.0, 0.38, 0.50), (1.0, 0.62, 0.58))
    piers = _in_box(p, (0.18, 0.42, 0.0), (0.26, 0.58, 0.50)) | _in_box(
        p, (0.74, 0.42, 0.0), (0.82, 0.58, 0.50))
    r = np.hypot(p[:, 0] - 0.5, p[:, 2] - 0.22)
    arch = (r >= 0.24) & (r <= 0.28) & (p[:, 2] >= 0.22) & (np.abs(p[:, 1] - 0.5) <= 0.08)
    rails = _in_box(p, (0.0, 0.38, 0.58), (1.0, 0.41, 0.68)) | _in_box(
        p, (0.0, 0.59, 0.58), (1.0, 0.62, 0.68))
    return deck | piers | arch | rails


def pillar_mask(p):
    r = np.hypot(p[:, 0] - 0.5, p[:, 1] - 0.5)
    shells = ((r >= 0.10) & (r <= 0.13)) | ((r >= 0.22) & (r <= 0.25))
    floors = (r <= 0.25) & (np.mod(p[:, 2], 0.25) < 0.03)
    return (shells | floors) & (p[:, 2] <= 1.0)


def gen_fixture(kind, points, seed=0):
    """Volumetric test object: a thin wall slab, a bridge or a layered pillar."""
    n = _check_count(points)
    rng = make_rng(seed)
    if kind == "wall":
        lo, hi = WALL_BOX
        return np.asarray(lo) + (np.asarray(hi) - np.asarray(lo)) * rng.random((n, 3))
    if kind == "bridge":
        return _rejection(n, bridge_mask, rng)
    if kind == "pillar":
        return _rejection(n, pillar_mask, rng)
    raise ValueError(f"unknown fixture {kind!r}; expected one of {FIXTURE_KINDS}")
