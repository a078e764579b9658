"""Point clouds on and off the unit sphere: construction, perturbation,
spherical interpolation, surface sampling and normalization."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AmbiguousSlerp,
    DegenerateCloud,
    DegenerateMesh,
    InvalidArgument,
)
from .rng import SeededRng

_UNIT_TOL = 1e-9
_GOLDEN_ANGLE = np.pi * (3.0 - np.sqrt(5.0))


@dataclass(frozen=True)
class PointCloud:
    """Ordered list of 3D points; ``on_unit_sphere`` promises unit norms."""

    points: np.ndarray
    on_unit_sphere: bool = False

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise InvalidArgument(f"points must be (N, 3), got {pts.shape}")
        pts = np.ascontiguousarray(pts)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if self.on_unit_sphere and len(pts):
            err = np.abs(np.linalg.norm(pts, axis=1) - 1.0).max()
            if err > _UNIT_TOL:
                raise InvalidArgument(
                    f"on_unit_sphere cloud has norm deviation {err:g}"
                )

    def __len__(self) -> int:
        return len(self.points)


def fibonacci_sphere(n: int) -> PointCloud:
    """Evenly distributed unit-sphere cloud via the offset Fibonacci lattice:
    z_i = 1 - (2i+1)/n, azimuth theta_i = i * pi * (3 - sqrt(5))."""
    if n < 1:
        raise InvalidArgument("n must be >= 1")
    i = np.arange(n, dtype=np.float64)
    z = 1.0 - (2.0 * i + 1.0) / n
    theta = i * _GOLDEN_ANGLE
    rho = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    pts = np.column_stack([rho * np.cos(theta), rho * np.sin(theta), z])
    # renormalize so downstream unit-norm guarantees hold to 1e-12, not 1e-16ish
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    return PointCloud(pts, on_unit_sphere=True)


def perturb_on_sphere(cloud: PointCloud, sigma: float, rng: SeededRng) -> PointCloud:
    """Add per-point isotropic gaussian offsets (std sigma per coordinate) and
    renormalize back onto the sphere.

    Consumes 3N gaussians from ``rng`` as N (x, y, z) triples in point order;
    points whose displaced position nearly vanishes redraw 3 more, up to 16
    times each, in point order.
    """
    if not cloud.on_unit_sphere:
        raise InvalidArgument("perturb_on_sphere requires a unit-sphere cloud")
    if sigma < 0:
        raise InvalidArgument("sigma must be >= 0")
    n = len(cloud)
    if sigma == 0.0:
        return cloud
    delta = rng.normals(3 * n).reshape(n, 3) * sigma
    moved = cloud.points + delta
    norms = np.linalg.norm(moved, axis=1)
    bad = np.flatnonzero(norms < 1e-12)
    for i in bad:
        for attempt in range(16):
            d = rng.normals(3) * sigma
            p = cloud.points[i] + d
            nn = np.linalg.norm(p)
            if nn >= 1e-12:
                moved[i] = p
                norms[i] = nn
                break
        else:
            raise DegenerateCloud(f"point {i}: perturbation kept vanishing")
    return PointCloud(moved / norms[:, None], on_unit_sphere=True)


def _slerp_arrays(a: np.ndarray, b: np.ndarray, alpha) -> np.ndarray:
    """Vectorized slerp of row-aligned unit vectors. alpha may be scalar or
    per-row. Raises AmbiguousSlerp on near-antipodal rows; near-parallel rows
    fall back to normalized lerp."""
    dot = np.clip(np.einsum("ij,ij->i", a, b), -1.0, 1.0)
    omega = np.arccos(dot)
    anti = np.flatnonzero(omega > np.pi - 1e-6)
    if len(anti):
        raise AmbiguousSlerp(
            f"antipodal endpoints at index {anti[0]} (angle {omega[anti[0]]:.8f})",
            index=int(anti[0]),
        )
    alpha = np.asarray(alpha, dtype=np.float64)
    close = omega < 1e-6
    safe_omega = np.where(close, 1.0, omega)
    sin_omega = np.sin(safe_omega)
    wa = np.where(close, 1.0 - alpha, np.sin((1.0 - alpha) * safe_omega) / sin_omega)
    wb = np.where(close, alpha, np.sin(alpha * safe_omega) / sin_omega)
    out = wa[:, None] * a + wb[:, None] * b
    return out / np.linalg.norm(out, axis=1, keepdims=True)


def slerp_point(a, b, alpha: float):
    """Great-circle interpolation between two unit 3-vectors."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    for v, name in ((a, "a"), (b, "b")):
        if abs(np.linalg.norm(v) - 1.0) > _UNIT_TOL:
            raise InvalidArgument(f"{name} is not unit length")
    if not 0.0 <= alpha <= 1.0:
        raise InvalidArgument("alpha must be in [0, 1]")
    if alpha == 0.0:
        return a
    if alpha == 1.0:
        return b
    return _slerp_arrays(a[None, :], b[None, :], alpha)[0]


def slerp_cloud(a: PointCloud, b: PointCloud, alpha: float) -> PointCloud:
    """Pointwise slerp of two corresponding unit-sphere clouds."""
    if not (a.on_unit_sphere and b.on_unit_sphere):
        raise InvalidArgument("slerp_cloud requires unit-sphere clouds")
    if len(a) != len(b):
        raise InvalidArgument(f"point count mismatch: {len(a)} vs {len(b)}")
    if not 0.0 <= alpha <= 1.0:
        raise InvalidArgument("alpha must be in [0, 1]")
    if alpha == 0.0:
        return a
    if alpha == 1.0:
        return b
    return PointCloud(_slerp_arrays(a.points, b.points, alpha), on_unit_sphere=True)


def sample_surface(mesh, n: int, rng: SeededRng) -> PointCloud:
    """Area-weighted uniform surface sampling of a triangle mesh.

    Consumes 3n uniforms as n (pick, u, v) triples in point order: ``pick``
    selects a triangle through the cumulative-area table, (u, v) are
    barycentric draws reflected into the lower triangle when u + v > 1.
    """
    if n < 1:
        raise InvalidArgument("n must be >= 1")
    verts = mesh.vertices
    tris = mesh.triangles
    if len(tris) == 0:
        raise DegenerateMesh("mesh has no triangles")
    p0 = verts[tris[:, 0]]
    e1 = verts[tris[:, 1]] - p0
    e2 = verts[tris[:, 2]] - p0
    areas = 0.5 * np.linalg.norm(np.cross(e1, e2), axis=1)
    total = areas.sum()
    if total <= 0.0:
        raise DegenerateMesh("mesh has zero total area")
    cum = np.cumsum(areas)
    draws = rng.uniforms(3 * n).reshape(n, 3)
    idx = np.searchsorted(cum, draws[:, 0] * total, side="right")
    idx = np.minimum(idx, len(tris) - 1)
    u = draws[:, 1]
    v = draws[:, 2]
    flip = u + v > 1.0
    u = np.where(flip, 1.0 - u, u)
    v = np.where(flip, 1.0 - v, v)
    pts = p0[idx] + u[:, None] * e1[idx] + v[:, None] * e2[idx]
    return PointCloud(pts, on_unit_sphere=False)


def scale_to_box(cloud: PointCloud, half_extent: float) -> PointCloud:
    """Center the cloud's bounding box at the origin and uniformly scale its
    largest half-dimension to ``half_extent``."""
    if half_extent <= 0:
        raise InvalidArgument("half_extent must be > 0")
    if len(cloud) == 0:
        raise InvalidArgument("empty cloud")
    lo = cloud.points.min(axis=0)
    hi = cloud.points.max(axis=0)
    half = (hi - lo).max() / 2.0
    if half <= 0.0:
        raise DegenerateCloud("cloud has zero extent in every axis")
    center = (lo + hi) / 2.0
    pts = (cloud.points - center) * (half_extent / half)
    return PointCloud(pts, on_unit_sphere=False)
