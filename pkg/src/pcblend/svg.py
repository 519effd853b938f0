"""Static orthographic scatter plots as standalone SVG files."""

import numpy as np

from .core import as_cloud, normalize_unit_cube

AXES = {"x": 0, "y": 1, "z": 2}


def project(points, axis="z"):
    """Normalized 2-D coordinates of an orthographic view along ``axis``."""
    if axis not in AXES:
        raise ValueError(f"axis must be one of x, y, z; got {axis!r}")
    pts, _ = normalize_unit_cube(as_cloud(points))
    keep = [a for a in range(3) if a != AXES[axis]]
    return pts[:, keep]


def export_svg(points, axis, path, size=512, radius=1.5, margin=16, color="#1f4e79"):
    """Write one ``<circle>`` per point; the cloud's box centre is the canvas centre."""
    uv = project(points, axis)
    span = size - 2 * margin
    cx = margin + uv[:, 0] * span
    cy = margin + (1.0 - uv[:, 1]) * span
    with open(path, "w") as f:
        f.write(
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
            f'viewBox="0 0 {size} {size}">\n'
        )
        f.write(f'<rect width="{size}" height="{size}" fill="white"/>\n')
        f.write(f'<g fill="{color}" fill-opacity="0.6">\n')
        for x, y in zip(cx.tolist(), cy.tolist()):
            f.write(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="{radius}"/>\n')
        f.write("</g>\n</svg>\n")
