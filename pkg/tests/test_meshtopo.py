import numpy as np
import pytest

from condsweep.errors import RequiresWeld
from condsweep.isosurface import EMPTY_MESH, TriangleMesh
from condsweep.meshtopo import (
    connected_components,
    euler_characteristic,
    is_watertight,
    split,
    surface_area,
    weld,
)

TET_VERTS = np.array(
    [[0.0, 0, 0], [1.0, 0, 0], [0.0, 1, 0], [0.0, 0, 1]], dtype=float
)
TET_TRIS = np.array([[0, 2, 1], [0, 1, 3], [0, 3, 2], [1, 2, 3]])


def _tet(offset=0.0):
    return TET_VERTS + offset, TET_TRIS


def _welded_tet(offset=0.0):
    v, t = _tet(offset)
    return TriangleMesh(v, t, welded=True)


class TestWeld:
    def test_exact_merge_cube_soup(self):
        corners = np.array(
            [[x, y, z] for x in (0, 1) for y in (0, 1) for z in (0, 1)], dtype=float
        )
        faces = [
            (0, 1, 3, 2), (4, 6, 7, 5), (0, 4, 5, 1),
            (2, 3, 7, 6), (0, 2, 6, 4), (1, 5, 7, 3),
        ]
        tris = []
        soup = []
        for a, b, c, d in faces:
            for t in ((a, b, c), (a, c, d)):
                base = len(soup)
                soup.extend(corners[list(t)])
                tris.append((base, base + 1, base + 2))
        mesh = TriangleMesh(np.array(soup), np.array(tris))
        out = weld(mesh, 1e-6)
        assert out.num_vertices == 8
        assert out.num_triangles == 12
        assert is_watertight(out)
        assert euler_characteristic(out) == 2

    def test_quantum_merges_nearby(self):
        v = np.array(
            [[0, 0, 0], [1, 0, 0], [0, 1, 0], [1 + 1e-8, 1e-8, 0], [0, 1 - 1e-8, 0], [1, 1, 0]],
            dtype=float,
        )
        t = np.array([[0, 1, 2], [3, 5, 4]])
        out = weld(TriangleMesh(v, t), 1e-6)
        assert out.num_vertices == 4

    def test_quantum_zero_keeps_distinct(self):
        v = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 1e-12, 0]], dtype=float)
        t = np.array([[0, 1, 2], [3, 1, 2]])
        out = weld(TriangleMesh(v, t), 0.0)
        assert out.num_vertices == 4

    def test_degenerate_triangles_dropped(self):
        v = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 0]], dtype=float)
        t = np.array([[0, 1, 2], [0, 1, 3]])  # second collapses after weld
        out = weld(TriangleMesh(v, t), 0.0)
        assert out.num_triangles == 1


class TestConnectedComponents:
    def test_requires_weld(self):
        mesh = TriangleMesh(TET_VERTS, TET_TRIS, welded=False)
        with pytest.raises(RequiresWeld):
            connected_components(mesh)

    def test_tetrahedron(self):
        assert connected_components(_welded_tet()) == 1

    def test_two_disjoint_triangles(self):
        v = np.array(
            [[0, 0, 0], [1, 0, 0], [0, 1, 0], [5, 0, 0], [6, 0, 0], [5, 1, 0]],
            dtype=float,
        )
        mesh = TriangleMesh(v, np.array([[0, 1, 2], [3, 4, 5]]), welded=True)
        assert connected_components(mesh) == 2

    def test_vertex_sharing_is_not_adjacency(self):
        v = np.array(
            [[0, 0, 0], [1, 0, 0], [0, 1, 0], [-1, 0, 0], [0, -1, 0]], dtype=float
        )
        mesh = TriangleMesh(v, np.array([[0, 1, 2], [0, 3, 4]]), welded=True)
        assert connected_components(mesh) == 2

    def test_invariant_under_reordering(self):
        v = np.vstack([TET_VERTS, TET_VERTS + 10])
        t = np.vstack([TET_TRIS, TET_TRIS + 4])
        base = TriangleMesh(v, t, welded=True)
        perm = np.random.default_rng(0).permutation(len(t))
        shuffled = TriangleMesh(v, t[perm], welded=True)
        assert connected_components(base) == connected_components(shuffled) == 2

    def test_matches_bfs_oracle_on_random_soups(self):
        rng = np.random.default_rng(3)
        for _ in range(30):
            nv = rng.integers(4, 20)
            nt = rng.integers(1, 50)
            tris = rng.integers(0, nv, size=(nt, 3))
            ok = (
                (tris[:, 0] != tris[:, 1])
                & (tris[:, 1] != tris[:, 2])
                & (tris[:, 0] != tris[:, 2])
            )
            tris = tris[ok]
            if len(tris) == 0:
                continue
            verts = rng.normal(size=(nv, 3))
            mesh = TriangleMesh(verts, tris, welded=True)
            # naive oracle: BFS over triangles sharing a full edge
            def edge_set(t):
                return {
                    tuple(sorted((t[0], t[1]))),
                    tuple(sorted((t[1], t[2]))),
                    tuple(sorted((t[2], t[0]))),
                }

            sets = [edge_set(t) for t in tris]
            n = len(tris)
            seen = [False] * n
            count = 0
            for s in range(n):
                if seen[s]:
                    continue
                count += 1
                stack = [s]
                seen[s] = True
                while stack:
                    i = stack.pop()
                    for j in range(n):
                        if not seen[j] and sets[i] & sets[j]:
                            seen[j] = True
                            stack.append(j)
            assert connected_components(mesh) == count


class TestSplit:
    def test_tet_round_trip(self):
        parts = split(_welded_tet())
        assert len(parts) == 1
        assert parts[0].num_triangles == 4
        assert is_watertight(parts[0])

    def test_two_tets(self):
        v = np.vstack([TET_VERTS, TET_VERTS + 10])
        t = np.vstack([TET_TRIS, TET_TRIS + 4])
        parts = split(TriangleMesh(v, t, welded=True))
        assert len(parts) == 2
        for p in parts:
            assert is_watertight(p)
            assert connected_components(p) == 1

    def test_split_preserves_area(self):
        v = np.vstack([TET_VERTS, TET_VERTS * 2 + 10])
        t = np.vstack([TET_TRIS, TET_TRIS + 4])
        mesh = TriangleMesh(v, t, welded=True)
        total = sum(surface_area(p) for p in split(mesh))
        assert abs(total - surface_area(mesh)) <= 1e-9 * surface_area(mesh)


class TestWatertight:
    def test_tet_true(self):
        assert is_watertight(_welded_tet())

    def test_single_triangle_false(self):
        mesh = TriangleMesh(TET_VERTS[:3], np.array([[0, 1, 2]]), welded=True)
        assert not is_watertight(mesh)

    def test_tet_minus_face_false(self):
        mesh = TriangleMesh(TET_VERTS, TET_TRIS[:3], welded=True)
        assert not is_watertight(mesh)

    def test_empty_false(self):
        assert not is_watertight(EMPTY_MESH)

    def test_three_f_equals_two_e_when_watertight(self):
        mesh = _welded_tet()
        t = mesh.triangles
        e = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
        e = np.unique(np.sort(e, axis=1), axis=0)
        assert 3 * mesh.num_triangles == 2 * len(e)


class TestEuler:
    def test_tet(self):
        assert euler_characteristic(_welded_tet()) == 2

    def test_two_tets_additive(self):
        v = np.vstack([TET_VERTS, TET_VERTS + 10])
        t = np.vstack([TET_TRIS, TET_TRIS + 4])
        assert euler_characteristic(TriangleMesh(v, t, welded=True)) == 4


class TestSurfaceArea:
    def test_unit_right_triangle(self):
        mesh = TriangleMesh(
            np.array([[0.0, 0, 0], [1.0, 0, 0], [0.0, 1, 0]]), np.array([[0, 1, 2]])
        )
        assert np.isclose(surface_area(mesh), 0.5)

    def test_empty(self):
        assert surface_area(EMPTY_MESH) == 0.0
