"""File formats: XYZ and binary PLY point clouds, OBJ triangle meshes."""

from __future__ import annotations

import struct

import numpy as np

from .errors import ParseError
from .isosurface import TriangleMesh
from .pointcloud import PointCloud


def write_xyz(cloud: PointCloud) -> str:
    """One `x y z` triple per line, 17 significant digits (float64 exact)."""
    return "".join(
        "%.17g %.17g %.17g\n" % (p[0], p[1], p[2]) for p in cloud.points
    )


def read_xyz(text: str, on_unit_sphere: bool = False) -> PointCloud:
    pts = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ParseError(f"expected 3 values, got {len(parts)}", line=lineno)
        try:
            pts.append([float(v) for v in parts])
        except ValueError as exc:
            raise ParseError(str(exc), line=lineno)
    return PointCloud(np.array(pts, dtype=np.float64).reshape(-1, 3), on_unit_sphere)


def write_ply(cloud: PointCloud) -> bytes:
    header = (
        "ply\n"
        "format binary_little_endian 1.0\n"
        f"element vertex {len(cloud)}\n"
        "property float x\n"
        "property float y\n"
        "property float z\n"
        "end_header\n"
    )
    return header.encode("ascii") + cloud.points.astype("<f4").tobytes()


def read_ply(data: bytes, on_unit_sphere: bool = False) -> PointCloud:
    end = data.find(b"end_header\n")
    if end < 0:
        raise ParseError("missing PLY end_header")
    header = data[:end].decode("ascii", errors="replace").splitlines()
    if not header or header[0].strip() != "ply":
        raise ParseError("not a PLY file")
    if not any("binary_little_endian" in ln for ln in header):
        raise ParseError("only binary little-endian PLY is supported")
    count = None
    for ln in header:
        parts = ln.split()
        if parts[:2] == ["element", "vertex"]:
            count = int(parts[2])
    if count is None:
        raise ParseError("PLY has no vertex element")
    body = data[end + len(b"end_header\n"):]
    if len(body) < 12 * count:
        raise ParseError("truncated PLY vertex data")
    vals = np.frombuffer(body, dtype="<f4", count=3 * count)
    return PointCloud(vals.astype(np.float64).reshape(-1, 3), on_unit_sphere)


def write_obj(mesh: TriangleMesh) -> str:
    lines = []
    for v in mesh.vertices:
        lines.append("v %.9g %.9g %.9g" % (v[0], v[1], v[2]))
    for t in mesh.triangles:
        lines.append("f %d %d %d" % (t[0] + 1, t[1] + 1, t[2] + 1))
    return "\n".join(lines) + ("\n" if lines else "")


def read_obj(text: str) -> TriangleMesh:
    """Reads `v` and `f` records; normals, texcoords and comments are
    ignored. Faces with more than 3 vertices are fan-triangulated."""
    verts = []
    tris = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        tag = parts[0]
        if tag == "v":
            if len(parts) < 4:
                raise ParseError("vertex needs 3 coordinates", line=lineno)
            try:
                verts.append([float(v) for v in parts[1:4]])
            except ValueError as exc:
                raise ParseError(str(exc), line=lineno)
        elif tag == "f":
            if len(parts) < 4:
                raise ParseError("face needs at least 3 vertices", line=lineno)
            try:
                # `i`, `i/j`, `i/j/k`, `i//k` all reduce to the vertex index
                idx = [int(p.split("/")[0]) for p in parts[1:]]
            except ValueError as exc:
                raise ParseError(str(exc), line=lineno)
            idx = [i - 1 if i > 0 else len(verts) + i for i in idx]
            for a, b in zip(idx[1:-1], idx[2:]):
                tris.append([idx[0], a, b])
        # vn / vt / o / g / s / usemtl etc. are ignored
    verts_arr = np.array(verts, dtype=np.float64).reshape(-1, 3)
    tris_arr = np.array(tris, dtype=np.int64).reshape(-1, 3)
    if len(tris_arr) and (tris_arr.min() < 0 or tris_arr.max() >= len(verts_arr)):
        raise ParseError("face index out of range")
    return TriangleMesh(verts_arr, tris_arr, welded=False)
