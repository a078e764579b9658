"""Zero level-set extraction from scalar grids, plus the voxel-level
connectivity oracle used to cross-check mesh component counts."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from ._mc_tables import EDGE_TABLE, TRI_TABLE
from .errors import InvalidArgument
from .generator import ScalarGrid

# corner k of a cell is the grid node at cell + _CORNER_OFFSETS[k]
_CORNER_OFFSETS = np.array(
    [
        [0, 0, 0],
        [1, 0, 0],
        [1, 1, 0],
        [0, 1, 0],
        [0, 0, 1],
        [1, 0, 1],
        [1, 1, 1],
        [0, 1, 1],
    ],
    dtype=np.int64,
)

# local edge e runs from node cell + _EDGE_NODE[e] along axis _EDGE_AXIS[e]
_EDGE_NODE = np.array(
    [
        [0, 0, 0],  # e0  v0-v1
        [1, 0, 0],  # e1  v1-v2
        [0, 1, 0],  # e2  v3-v2
        [0, 0, 0],  # e3  v0-v3
        [0, 0, 1],  # e4  v4-v5
        [1, 0, 1],  # e5  v5-v6
        [0, 1, 1],  # e6  v7-v6
        [0, 0, 1],  # e7  v4-v7
        [0, 0, 0],  # e8  v0-v4
        [1, 0, 0],  # e9  v1-v5
        [1, 1, 0],  # e10 v2-v6
        [0, 1, 0],  # e11 v3-v7
    ],
    dtype=np.int64,
)
_EDGE_AXIS = np.array([0, 1, 0, 1, 0, 1, 0, 1, 2, 2, 2, 2], dtype=np.int64)


@dataclass(frozen=True)
class TriangleMesh:
    """Indexed triangle soup. ``welded`` promises shared vertices are merged
    and no triangle repeats an index."""

    vertices: np.ndarray
    triangles: np.ndarray
    welded: bool = False

    def __post_init__(self):
        verts = np.ascontiguousarray(np.asarray(self.vertices, dtype=np.float64))
        tris = np.ascontiguousarray(np.asarray(self.triangles, dtype=np.int64))
        verts = verts.reshape(-1, 3)
        tris = tris.reshape(-1, 3)
        if len(tris) and (tris.min() < 0 or tris.max() >= len(verts)):
            raise InvalidArgument("triangle index out of range")
        verts.setflags(write=False)
        tris.setflags(write=False)
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "triangles", tris)

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    @property
    def num_triangles(self) -> int:
        return len(self.triangles)


EMPTY_MESH = TriangleMesh(np.zeros((0, 3)), np.zeros((0, 3), dtype=np.int64), welded=True)


def marching_cubes(grid: ScalarGrid) -> TriangleMesh:
    """Triangulate the level set with the fixed 256-case table and linear edge
    interpolation. Vertices are welded through globally unique edge keys, so
    the output is bit-stable and already shared between adjacent cells."""
    g = grid.spec.resolution
    level = float(grid.level)
    arr = grid.as_array().astype(np.float64)
    inside = arr < level
    if not inside.any() or inside.all():
        return EMPTY_MESH

    n = g - 1
    # cube index per cell from the 8 corner inside-bits
    ci = np.zeros((n, n, n), dtype=np.int64)
    for k, (ox, oy, oz) in enumerate(_CORNER_OFFSETS):
        ci |= inside[ox : ox + n, oy : oy + n, oz : oz + n].astype(np.int64) << k
    ci = ci.ravel()
    active = np.flatnonzero(EDGE_TABLE[ci] != 0)
    if len(active) == 0:
        return EMPTY_MESH

    rows = TRI_TABLE[ci[active]]  # (M, 16)
    valid = rows >= 0
    corner_edges = rows[valid]  # flattened corner stream, 3 per triangle
    corner_cells = np.repeat(active, valid.sum(axis=1))

    # ci was raveled from an (n, n, n) array indexed [ix, iy, iz] in C order:
    # linear = iz + n*(iy + n*ix)
    ix, rem = np.divmod(corner_cells, n * n)
    iy, iz = np.divmod(rem, n)
    cell_xyz = np.column_stack([ix, iy, iz])

    node = cell_xyz + _EDGE_NODE[corner_edges]
    axis = _EDGE_AXIS[corner_edges]
    code = ((node[:, 0] * g + node[:, 1]) * g + node[:, 2]) * 3 + axis
    uniq, inv = np.unique(code, return_inverse=True)
    # the table's winding is inward for our inside = (value < level); swap
    # so normals point outward
    triangles = inv.reshape(-1, 3)[:, [0, 2, 1]]

    # interpolate one vertex per unique grid edge
    ucode, uaxis = np.divmod(uniq, 3)
    uz = ucode % g
    uy = (ucode // g) % g
    ux = ucode // (g * g)
    v0 = arr[ux, uy, uz]
    step = np.eye(3, dtype=np.int64)[uaxis]
    v1 = arr[ux + step[:, 0], uy + step[:, 1], uz + step[:, 2]]
    t = (level - v0) / (v1 - v0)
    lo = np.asarray(grid.spec.lower)
    vox = grid.spec.voxel_size
    base = lo + (np.column_stack([ux, uy, uz]) + 0.5) * vox
    verts = base + t[:, None] * (step * vox)

    mesh = TriangleMesh(verts, triangles, welded=True)
    return mesh


def voxel_components(grid: ScalarGrid) -> int:
    """Number of 6-connected components of the interior voxel set
    (values below the grid level)."""
    interior = grid.as_array() < grid.level
    _, count = ndimage.label(interior, structure=ndimage.generate_binary_structure(3, 1))
    return int(count)
