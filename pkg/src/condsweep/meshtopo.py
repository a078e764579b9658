"""Mesh topology measurements: welding, component counting via union-find
over shared edges, splitting, watertightness and Euler characteristic."""

from __future__ import annotations

import numpy as np

from .errors import RequiresWeld
from .isosurface import EMPTY_MESH, TriangleMesh


def _require_welded(mesh: TriangleMesh):
    if not mesh.welded:
        raise RequiresWeld("operation requires a welded mesh (call weld first)")


def weld(mesh: TriangleMesh, quantum: float) -> TriangleMesh:
    """Merge vertices that agree after snapping coordinates to a grid of
    spacing ``quantum`` (0 merges only bit-identical vertices). Each merged
    vertex keeps the coordinates of its first occurrence. Triangles left with
    a repeated index are dropped."""
    verts = mesh.vertices
    if len(verts) == 0:
        return EMPTY_MESH
    if quantum < 0:
        raise ValueError("quantum must be >= 0")
    key = np.round(verts / quantum) if quantum > 0 else verts
    view = np.ascontiguousarray(key).view([("x", "f8"), ("y", "f8"), ("z", "f8")])
    _, first, inverse = np.unique(view, return_index=True, return_inverse=True)
    # renumber so vertex order follows first appearance, keeping output stable
    order = np.argsort(first, kind="stable")
    rank = np.empty_like(order)
    rank[order] = np.arange(len(order))
    new_verts = verts[first[order]]
    tris = rank[inverse.ravel()][mesh.triangles]
    ok = (
        (tris[:, 0] != tris[:, 1])
        & (tris[:, 1] != tris[:, 2])
        & (tris[:, 0] != tris[:, 2])
    )
    return TriangleMesh(new_verts, tris[ok], welded=True)


def _edges(mesh: TriangleMesh) -> np.ndarray:
    """(3T, 2) undirected edges, endpoints sorted, grouped by triangle."""
    tris = mesh.triangles
    e = np.concatenate([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]])
    return np.sort(e, axis=1)


class _UnionFind:
    def __init__(self, n: int):
        self.parent = np.arange(n, dtype=np.int64)

    def find(self, i: int) -> int:
        p = self.parent
        root = i
        while p[root] != root:
            root = p[root]
        while p[i] != root:
            p[i], i = root, p[i]
        return root

    def union(self, a: int, b: int):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def _triangle_labels(mesh: TriangleMesh) -> np.ndarray:
    """Component label per triangle; triangles are adjacent iff they share a
    full welded edge."""
    t = mesh.num_triangles
    uf = _UnionFind(t)
    edges = _edges(mesh)
    tri_of_edge = np.tile(np.arange(t, dtype=np.int64), 3)
    order = np.lexsort((edges[:, 1], edges[:, 0]))
    se = edges[order]
    st = tri_of_edge[order]
    same = np.all(se[1:] == se[:-1], axis=1)
    for i in np.flatnonzero(same):
        uf.union(int(st[i]), int(st[i + 1]))
    roots = np.array([uf.find(i) for i in range(t)], dtype=np.int64)
    _, labels = np.unique(roots, return_inverse=True)
    return labels


def connected_components(mesh: TriangleMesh) -> int:
    _require_welded(mesh)
    if mesh.num_triangles == 0:
        return 0
    return int(_triangle_labels(mesh).max()) + 1


def split(mesh: TriangleMesh) -> list:
    """One mesh per component, vertex indices compacted, ordered by each
    component's first triangle in the input."""
    _require_welded(mesh)
    if mesh.num_triangles == 0:
        return []
    labels = _triangle_labels(mesh)
    uniq, firsts = np.unique(labels, return_index=True)
    out = []
    for lab in uniq[np.argsort(firsts, kind="stable")]:
        tris = mesh.triangles[labels == lab]
        used, local = np.unique(tris, return_inverse=True)
        out.append(
            TriangleMesh(mesh.vertices[used], local.reshape(-1, 3), welded=True)
        )
    return out


def is_watertight(mesh: TriangleMesh) -> bool:
    """True iff every undirected edge is shared by exactly two triangles."""
    _require_welded(mesh)
    if mesh.num_triangles == 0:
        return False
    edges = _edges(mesh)
    view = np.ascontiguousarray(edges).view([("a", "i8"), ("b", "i8")])
    _, counts = np.unique(view, return_counts=True)
    return bool(np.all(counts == 2))


def euler_characteristic(mesh: TriangleMesh) -> int:
    """V - E + F over unique undirected edges."""
    _require_welded(mesh)
    if mesh.num_triangles == 0:
        return mesh.num_vertices
    edges = _edges(mesh)
    view = np.ascontiguousarray(edges).view([("a", "i8"), ("b", "i8")])
    e = len(np.unique(view))
    return int(mesh.num_vertices - e + mesh.num_triangles)


def surface_area(mesh: TriangleMesh) -> float:
    if mesh.num_triangles == 0:
        return 0.0
    v = mesh.vertices
    t = mesh.triangles
    cross = np.cross(v[t[:, 1]] - v[t[:, 0]], v[t[:, 2]] - v[t[:, 0]])
    return float(0.5 * np.linalg.norm(cross, axis=1).sum())
