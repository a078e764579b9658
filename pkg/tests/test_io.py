import numpy as np
import pytest

from condsweep.errors import ParseError
from condsweep.io import read_obj, read_ply, read_xyz, write_obj, write_ply, write_xyz
from condsweep.isosurface import TriangleMesh
from condsweep.pointcloud import PointCloud, fibonacci_sphere

TET = TriangleMesh(
    np.array([[0.0, 0, 0], [1.0, 0, 0], [0.0, 1, 0], [0.0, 0, 1]]),
    np.array([[0, 2, 1], [0, 1, 3], [0, 3, 2], [1, 2, 3]]),
)


class TestXyz:
    def test_round_trip_exact(self):
        cloud = fibonacci_sphere(100)
        out = read_xyz(write_xyz(cloud), on_unit_sphere=True)
        assert np.array_equal(out.points, cloud.points)

    def test_comments_and_blank_lines(self):
        text = "# heading\n\n0.5 0 0  # trailing comment\n1 2 3\n"
        out = read_xyz(text)
        assert np.array_equal(out.points, [[0.5, 0, 0], [1, 2, 3]])

    def test_bad_line_reports_number(self):
        with pytest.raises(ParseError) as exc:
            read_xyz("1 2 3\n4 5\n")
        assert exc.value.line == 2

    def test_non_numeric(self):
        with pytest.raises(ParseError):
            read_xyz("a b c\n")


class TestPly:
    def test_round_trip_float32(self):
        cloud = PointCloud(
            np.array([[0.125, -1.5, 3.0], [7.25, 0.0, -0.0625]])
        )
        out = read_ply(write_ply(cloud))
        assert np.array_equal(out.points, cloud.points)  # exactly representable

    def test_header_checks(self):
        with pytest.raises(ParseError):
            read_ply(b"not a ply file")
        data = write_ply(PointCloud(np.zeros((1, 3))))
        ascii_hdr = data.replace(b"binary_little_endian", b"ascii")
        with pytest.raises(ParseError):
            read_ply(ascii_hdr)

    def test_truncated(self):
        data = write_ply(PointCloud(np.zeros((4, 3))))
        with pytest.raises(ParseError):
            read_ply(data[:-5])


class TestObj:
    def test_tetrahedron_round_trip(self):
        out = read_obj(write_obj(TET))
        assert np.array_equal(out.triangles, TET.triangles)
        assert np.allclose(out.vertices, TET.vertices, atol=1e-9)

    def test_empty_round_trip(self):
        empty = TriangleMesh(np.zeros((0, 3)), np.zeros((0, 3), dtype=np.int64))
        out = read_obj(write_obj(empty))
        assert out.num_vertices == 0 and out.num_triangles == 0

    def test_extras_ignored(self):
        text = (
            "# comment\nvn 0 0 1\nvt 0 0\no thing\n"
            "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1/1/1 2/2/1 3//1\n"
        )
        out = read_obj(text)
        assert out.num_vertices == 3
        assert np.array_equal(out.triangles, [[0, 1, 2]])

    def test_quad_fan_triangulated(self):
        text = "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n"
        out = read_obj(text)
        assert np.array_equal(out.triangles, [[0, 1, 2], [0, 2, 3]])

    def test_negative_indices(self):
        text = "v 0 0 0\nv 1 0 0\nv 0 1 0\nf -3 -2 -1\n"
        out = read_obj(text)
        assert np.array_equal(out.triangles, [[0, 1, 2]])

    def test_errors(self):
        with pytest.raises(ParseError):
            read_obj("v 1 2\n")
        with pytest.raises(ParseError):
            read_obj("v 0 0 0\nf 1 2 9\n")
        with pytest.raises(ParseError) as exc:
            read_obj("v 0 0 0\nf 1 x 1\n")
        assert exc.value.line == 2

    def test_precision_nine_digits(self):
        mesh = TriangleMesh(
            np.array([[1 / 3, 2 / 3, 1e-7], [1, 0, 0], [0, 1, 0]]),
            np.array([[0, 1, 2]]),
        )
        out = read_obj(write_obj(mesh))
        assert np.allclose(out.vertices, mesh.vertices, rtol=1e-8, atol=1e-15)
