"""Shape generators: configure from a conditioning vector, produce a scalar
field whose zero level set is the shape (negative inside).

Two analytic backends are built in (a thresholded density field and an exact
union-of-balls SDF); the "external" backend forwards to a remote model over
the newline-delimited JSON protocol (see condsweep.external).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage
from scipy.spatial import cKDTree

from .encoder import ConditionVector, GridSpec
from .errors import DimMismatch, InvalidArgument

DEFAULT_TAU = 0.35


@dataclass(frozen=True)
class ScalarGrid:
    """G^3 scalar samples at voxel centers, x-fastest; values are float32
    (the on-wire precision) so local and remote decodes agree bitwise."""

    spec: GridSpec
    values: np.ndarray
    level: float = 0.0

    def __post_init__(self):
        g = self.spec.resolution
        vals = np.ascontiguousarray(np.asarray(self.values), dtype=np.float32).ravel()
        if vals.size != g ** 3:
            raise InvalidArgument(f"expected {g ** 3} values, got {vals.size}")
        if not np.all(np.isfinite(vals)):
            raise InvalidArgument("grid has non-finite values")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def as_array(self) -> np.ndarray:
        """(G, G, G) view indexed [ix, iy, iz]."""
        g = self.spec.resolution
        return self.values.reshape((g, g, g), order="F")


@dataclass(frozen=True)
class GeneratorBackend:
    """Backend selector plus its settings. ``declared_cond_dim`` of None means
    the backend's structural check alone applies."""

    backend_id: str
    parameters: dict = field(default_factory=dict)
    declared_cond_dim: int | None = None
    reported_weight_count: int | None = None

    def __post_init__(self):
        if self.backend_id not in ("density", "balls", "external"):
            raise InvalidArgument(f"unknown backend {self.backend_id!r}")


def decode_density(c: ConditionVector, spec: GridSpec, tau: float) -> ScalarGrid:
    """tau minus the stored normalized density; negative where density beats
    the threshold, i.e. inside."""
    if c.encoder_id != "density":
        raise InvalidArgument(f"density backend got encoder {c.encoder_id!r}")
    if not 0.0 < tau < 1.0:
        raise InvalidArgument("tau must be in (0, 1)")
    if c.dim != spec.resolution ** 3:
        raise DimMismatch(f"dim {c.dim} != {spec.resolution}^3")
    vals = np.float64(tau) - c.values.astype(np.float64)
    return ScalarGrid(spec, vals.astype(np.float32), level=0.0)


def decode_balls(c: ConditionVector, spec: GridSpec, radius: float) -> ScalarGrid:
    """Exact SDF of the union of balls of ``radius`` centered at the encoded
    points, sampled at voxel centers."""
    if c.encoder_id != "coords":
        raise InvalidArgument(f"balls backend got encoder {c.encoder_id!r}")
    if radius <= 0:
        raise InvalidArgument("radius must be > 0")
    if c.dim % 3 != 0:
        raise DimMismatch(f"dim {c.dim} not divisible by 3")
    pts = c.values.astype(np.float64).reshape(-1, 3)
    g = spec.resolution
    xs = spec.axis_centers(0)
    ys = spec.axis_centers(1)
    zs = spec.axis_centers(2)
    ix, iy, iz = np.meshgrid(xs, ys, zs, indexing="ij")
    centers = np.column_stack([ix.ravel(order="F"), iy.ravel(order="F"), iz.ravel(order="F")])
    dist, _ = cKDTree(pts).query(centers, k=1)
    return ScalarGrid(spec, (dist - radius).astype(np.float32), level=0.0)


_FACE_STRUCTURE = ndimage.generate_binary_structure(3, 1)


def fill_enclosed_voids(grid: ScalarGrid) -> ScalarGrid:
    """Flip exterior pockets not reachable from the grid boundary to interior.

    Analytic encoders of surface samples produce shells; the reference
    experiments measure solids, so cavities fully enclosed by the interior are
    filled before meshing. Values in filled pockets are negated in magnitude,
    leaving no spurious zero crossing at the pocket boundary.
    """
    g = grid.spec.resolution
    vals = grid.values.astype(np.float32).copy()
    arr = vals.reshape((g, g, g), order="F")
    outside = arr >= grid.level
    labels, count = ndimage.label(outside, structure=_FACE_STRUCTURE)
    if count > 0:
        border = np.zeros_like(outside)
        border[0, :, :] = border[-1, :, :] = True
        border[:, 0, :] = border[:, -1, :] = True
        border[:, :, 0] = border[:, :, -1] = True
        open_labels = np.unique(labels[border & outside])
        enclosed = outside & ~np.isin(labels, open_labels)
        if enclosed.any():
            arr[enclosed] = grid.level - np.abs(arr[enclosed] - grid.level)
    return ScalarGrid(grid.spec, vals, level=grid.level)


def decode(
    backend: GeneratorBackend,
    c: ConditionVector,
    seed: int,
    spec: GridSpec,
    fill_voids: bool = True,
) -> ScalarGrid:
    """Dispatch to the configured backend. ``seed`` is forwarded so records
    stay backend-agnostic; the analytic backends ignore it."""
    if backend.declared_cond_dim is not None and c.dim != backend.declared_cond_dim:
        raise DimMismatch(
            f"condition dim {c.dim} != declared {backend.declared_cond_dim}"
        )
    if backend.backend_id == "density":
        tau = backend.parameters.get("tau", DEFAULT_TAU)
        grid = decode_density(c, spec, tau)
    elif backend.backend_id == "balls":
        radius = backend.parameters.get("radius", 3.0 * float(spec.voxel_size.max()))
        grid = decode_balls(c, spec, radius)
    else:
        from .external import ExternalSession

        session = backend.parameters.get("session")
        if session is None:
            session = ExternalSession.from_parameters(backend.parameters)
        grid = session.remote_decode(c, seed, spec)
    if fill_voids:
        grid = fill_enclosed_voids(grid)
    return grid
