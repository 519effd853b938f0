"""Reading and writing point clouds.

Two formats are supported:

* ``xyz``: ASCII, one point per line as three whitespace-separated reals,
  ``#`` starts a comment.
* ``ply``: ``binary_little_endian 1.0`` with a single ``vertex`` element
  carrying float32 ``x``, ``y``, ``z`` properties.
"""

import os

import numpy as np

from .core import as_cloud

PLY_FLOAT_TYPES = ("float", "float32")


class CloudFormatError(ValueError):
    """Raised for malformed or unsupported point-cloud files."""


def _infer_format(path, fmt):
    if fmt is not None:
        fmt = fmt.lower()
    else:
        fmt = os.path.splitext(str(path))[1].lower().lstrip(".")
    if fmt not in ("ply", "xyz"):
        raise CloudFormatError(f"unsupported format {fmt!r} for {path}")
    return fmt


def load_cloud(path, fmt=None):
    fmt = _infer_format(path, fmt)
    if fmt == "ply":
        return read_ply(path)
    return read_xyz(path)


def store_cloud(points, path, fmt=None):
    fmt = _infer_format(path, fmt)
    if fmt == "ply":
        write_ply(points, path)
    else:
        write_xyz(points, path)


def read_xyz(path):
    rows = []
    with open(path, "r") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            fields = line.split()
            if len(fields) != 3:
                raise CloudFormatError(
                    f"{path}: line {lineno}: expected 3 columns, got {len(fields)}"
                )
            try:
                rows.append([float(v) for v in fields])
            except ValueError:
                raise CloudFormatError(f"{path}: line {lineno}: not a number") from None
    if not rows:
        raise CloudFormatError(f"{path}: no points")
    try:
        return as_cloud(rows)
    except ValueError as exc:
        raise CloudFormatError(f"{path}: {exc}") from None


def write_xyz(points, path):
    pts = as_cloud(points)
    np.savetxt(path, pts, fmt="%.17g")


def _ply_header(n):
    return (
        "ply\n"
        "format binary_little_endian 1.0\n"
        f"element vertex {n}\n"
        "property float x\n"
        "property float y\n"
        "property float z\n"
        "end_header\n"
    ).encode("ascii")


def write_ply(points, path):
    pts = as_cloud(points)
    with open(path, "wb") as f:
        f.write(_ply_header(len(pts)))
        f.write(pts.astype("<f4").tobytes())


def read_ply(path):
    with open(path, "rb") as f:
        data = f.read()
    end = data.find(b"end_header\n")
    if not data.startswith(b"ply\n") or end < 0:
        raise CloudFormatError(f"{path}: not a PLY file (missing magic or end_header)")
    header = data[:end].decode("ascii", errors="replace").splitlines()
    body_offset = end + len(b"end_header\n")

    n = None
    props = []
    for lineno, line in enumerate(header[1:], start=2):
        fields = line.split()
        if not fields or fields[0] in ("comment", "obj_info"):
            continue
        if fields[0] == "format":
            if fields[1:] != ["binary_little_endian", "1.0"]:
                raise CloudFormatError(
                    f"{path}: header line {lineno}: unsupported format {' '.join(fields[1:])}"
                )
        elif fields[0] == "element":
            if len(fields) != 3 or fields[1] != "vertex" or n is not None:
                raise CloudFormatError(
                    f"{path}: header line {lineno}: unsupported element {' '.join(fields[1:])}"
                )
            n = int(fields[2])
        elif fields[0] == "property":
            if len(fields) != 3 or fields[1] not in PLY_FLOAT_TYPES:
                raise CloudFormatError(
                    f"{path}: header line {lineno}: unsupported property {' '.join(fields[1:])}"
                )
            props.append(fields[2])
        else:
            raise CloudFormatError(f"{path}: header line {lineno}: unexpected {fields[0]!r}")
    if n is None:
        raise CloudFormatError(f"{path}: no vertex element")
    if props != ["x", "y", "z"]:
        raise CloudFormatError(f"{path}: vertex properties must be x y z, got {props}")

    expected = n * 12
    actual = len(data) - body_offset
    if actual != expected:
        raise CloudFormatError(
            f"{path}: vertex data at offset {body_offset}: expected {expected} bytes, got {actual}"
        )
    pts = np.frombuffer(data, dtype="<f4", count=3 * n, offset=body_offset)
    try:
        return as_cloud(pts.reshape(n, 3).astype(np.float64))
    except ValueError as exc:
        raise CloudFormatError(f"{path}: {exc}") from None
