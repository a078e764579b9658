"""Analytic encoders mapping point clouds to conditioning vectors, plus the
CVEC/CVBT binary formats.

Conditioning vectors are stored as float32: that is the on-disk and on-wire
precision, and keeping the in-memory representation identical makes local and
remote pipelines bit-compatible.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import DimMismatch, EmptyCloud, InvalidArgument, OutOfBounds, ParseError
from .pointcloud import PointCloud

_CVEC_MAGIC = b"CVEC"
_CVBT_MAGIC = b"CVBT"


@dataclass(frozen=True)
class GridSpec:
    """Axis-aligned G^3 sampling lattice; samples sit at voxel centers."""

    resolution: int
    lower: tuple = (-1.25, -1.25, -1.25)
    upper: tuple = (1.25, 1.25, 1.25)

    def __post_init__(self):
        if self.resolution < 2:
            raise InvalidArgument("resolution must be >= 2")
        lo = np.asarray(self.lower, dtype=np.float64)
        hi = np.asarray(self.upper, dtype=np.float64)
        if lo.shape != (3,) or hi.shape != (3,):
            raise InvalidArgument("bounds must be 3-vectors")
        if not np.all(hi > lo):
            raise InvalidArgument("upper must exceed lower componentwise")
        object.__setattr__(self, "lower", tuple(lo))
        object.__setattr__(self, "upper", tuple(hi))

    @property
    def voxel_size(self) -> np.ndarray:
        return (np.asarray(self.upper) - np.asarray(self.lower)) / self.resolution

    def axis_centers(self, axis: int) -> np.ndarray:
        step = self.voxel_size[axis]
        return self.lower[axis] + (np.arange(self.resolution) + 0.5) * step

    def default_bandwidth(self) -> float:
        """1.5 voxel edges along the widest axis."""
        return 1.5 * float(self.voxel_size.max())


DEFAULT_GRID = GridSpec(32)


@dataclass(frozen=True)
class ConditionVector:
    """Flat conditioning vector c with its producing encoder's tag."""

    values: np.ndarray
    encoder_id: str

    def __post_init__(self):
        vals = np.ascontiguousarray(np.asarray(self.values), dtype=np.float32).ravel()
        if vals.size == 0:
            raise InvalidArgument("condition vector must be nonempty")
        if not np.all(np.isfinite(vals)):
            raise InvalidArgument("condition vector has non-finite entries")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def dim(self) -> int:
        return int(self.values.size)


def encode_density(cloud: PointCloud, spec: GridSpec, bandwidth: float | None = None) -> ConditionVector:
    """Splat a truncated gaussian kernel (std ``bandwidth``, support 3h) from
    every point onto the voxel-center lattice, then normalize the grid so its
    maximum is 1. Order-invariant in the points. ``bandwidth`` defaults to
    1.5 voxel edges."""
    if len(cloud) == 0:
        raise EmptyCloud("cannot encode an empty cloud")
    if bandwidth is None:
        bandwidth = spec.default_bandwidth()
    if bandwidth <= 0:
        raise InvalidArgument("bandwidth must be > 0")
    g = spec.resolution
    lo = np.asarray(spec.lower)
    vox = spec.voxel_size
    pts = cloud.points
    cut = 3.0 * bandwidth
    reach = np.ceil(cut / vox).astype(int)

    # nearest voxel index per point, then a shared offset window around it;
    # the gaussian is separable, so build per-axis weights and combine them
    # by broadcasting instead of materializing an (N, W, 3) window
    centers = np.floor((pts - lo) / vox - 0.5).astype(np.int64)
    two_h2 = 2.0 * bandwidth * bandwidth
    axis_idx, axis_d2, axis_w = [], [], []
    for a in range(3):
        ia = centers[:, a : a + 1] + np.arange(-reach[a], reach[a] + 2)
        da = lo[a] + (ia + 0.5) * vox[a] - pts[:, a : a + 1]
        d2a = da * da
        wa = np.exp(-d2a / two_h2)
        wa[(ia < 0) | (ia >= g)] = 0.0
        axis_idx.append(np.clip(ia, 0, g - 1))
        axis_d2.append(d2a)
        axis_w.append(wa)
    d2 = (
        axis_d2[0][:, :, None, None]
        + axis_d2[1][:, None, :, None]
        + axis_d2[2][:, None, None, :]
    )
    w = (
        axis_w[0][:, :, None, None]
        * axis_w[1][:, None, :, None]
        * axis_w[2][:, None, None, :]
    )
    w[d2 > cut * cut] = 0.0
    # x-fastest flattening: linear = ix + g*(iy + g*iz)
    lin = axis_idx[0][:, :, None, None] + g * (
        axis_idx[1][:, None, :, None] + g * axis_idx[2][:, None, None, :]
    )
    grid = np.bincount(lin.ravel(), weights=w.ravel(), minlength=g * g * g)
    peak = grid.max()
    if peak <= 0.0:
        raise OutOfBounds("cloud lies outside the grid bounds")
    grid /= peak
    return ConditionVector(grid.astype(np.float32), encoder_id="density")


def encode_coords(cloud: PointCloud) -> ConditionVector:
    """Lossless flattening of point coordinates in input order (dim 3N)."""
    if len(cloud) == 0:
        raise EmptyCloud("cannot encode an empty cloud")
    return ConditionVector(cloud.points.astype(np.float32).ravel(), encoder_id="coords")


# ---------------------------------------------------------------------------
# binary formats
# ---------------------------------------------------------------------------

def write_cvec(cond: ConditionVector) -> bytes:
    return (
        _CVEC_MAGIC
        + struct.pack("<IQ", 1, cond.dim)
        + cond.values.astype("<f4").tobytes()
    )


def read_cvec(data: bytes, encoder_id: str = "unknown") -> ConditionVector:
    if data[:4] != _CVEC_MAGIC:
        raise ParseError("bad CVEC magic")
    version, dim = struct.unpack_from("<IQ", data, 4)
    if version != 1:
        raise ParseError(f"unsupported CVEC version {version}")
    vals = np.frombuffer(data, dtype="<f4", count=dim, offset=16)
    if vals.size != dim:
        raise ParseError("truncated CVEC payload")
    return ConditionVector(vals, encoder_id=encoder_id)


def write_cvbt(conds: list) -> bytes:
    if not conds:
        raise InvalidArgument("empty batch")
    dim = conds[0].dim
    for c in conds:
        if c.dim != dim:
            raise DimMismatch("batch members disagree on dim")
    rows = np.stack([c.values for c in conds]).astype("<f4")
    return _CVBT_MAGIC + struct.pack("<IQQ", 1, len(conds), dim) + rows.tobytes()


def read_cvbt(data: bytes, encoder_id: str = "unknown") -> list:
    if data[:4] != _CVBT_MAGIC:
        raise ParseError("bad CVBT magic")
    version, count, dim = struct.unpack_from("<IQQ", data, 4)
    if version != 1:
        raise ParseError(f"unsupported CVBT version {version}")
    vals = np.frombuffer(data, dtype="<f4", count=count * dim, offset=24)
    if vals.size != count * dim:
        raise ParseError("truncated CVBT payload")
    rows = vals.reshape(count, dim)
    return [ConditionVector(r, encoder_id=encoder_id) for r in rows]
