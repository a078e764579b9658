"""PCA submanifold over conditioning vectors: fit via the k x k Gram matrix
(the condition dimension may be huge while the sample count is small),
project/reconstruct in standardized coordinates, sample and interpolate."""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .encoder import ConditionVector
from .errors import (
    DegenerateMode,
    DimMismatch,
    InsufficientData,
    InvalidArgument,
    ParseError,
)
from .rng import SeededRng

_RANK_EPS = 1e-10
_PCAM_MAGIC = b"PCAM"


@dataclass(frozen=True)
class PcaModel:
    mean: np.ndarray          # (C,)
    modes: np.ndarray         # (d, C) orthonormal rows, descending variance
    mode_stds: np.ndarray     # (d,)
    explained: np.ndarray     # (d,) eigenvalue share of total variance
    k_train: int
    encoder_id: str = "pca"   # tag of the training vectors, carried to outputs

    def __post_init__(self):
        for name in ("mean", "modes", "mode_stds", "explained"):
            arr = np.ascontiguousarray(np.asarray(getattr(self, name), dtype=np.float64))
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def dim(self) -> int:
        return int(self.mean.size)

    @property
    def n_modes(self) -> int:
        return int(self.modes.shape[0])


@dataclass(frozen=True)
class SubspaceCoords:
    """Coordinates in units of per-mode standard deviations."""

    z: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(np.asarray(self.z, dtype=np.float64)).ravel()
        arr.setflags(write=False)
        object.__setattr__(self, "z", arr)


def pca_fit(conditions, d: int) -> PcaModel:
    """Top-d PCA of k condition vectors through the k x k Gram eigensolve.

    Modes are recovered as X^T u / sqrt(lambda), identical to the direct
    covariance eigenvectors; the retained count is capped at the numerical
    rank (eigenvalues above 1e-10 of the largest). Each mode's sign is fixed
    so its largest-magnitude entry is positive.
    """
    conds = list(conditions)
    k = len(conds)
    if k < 2:
        raise InsufficientData("need at least 2 condition vectors")
    if d < 1:
        raise InvalidArgument("d must be >= 1")
    dim = conds[0].dim
    encoder_id = conds[0].encoder_id
    for c in conds:
        if c.dim != dim:
            raise DimMismatch(f"mixed dims {dim} and {c.dim}")
        if c.encoder_id != encoder_id:
            raise InvalidArgument(
                f"mixed encoders {encoder_id!r} and {c.encoder_id!r}"
            )
    x = np.stack([c.values.astype(np.float64) for c in conds])
    mean = x.mean(axis=0)
    x -= mean
    gram = x @ x.T
    lam, u = np.linalg.eigh(gram)
    lam = lam[::-1]
    u = u[:, ::-1]
    lam = np.maximum(lam, 0.0)
    total = lam.sum()
    if total <= 0.0:
        return PcaModel(mean, np.zeros((0, dim)), np.zeros(0), np.zeros(0), k, encoder_id)
    rank = int(np.sum(lam > _RANK_EPS * lam[0]))
    keep = min(d, rank)
    lam_k = lam[:keep]
    modes = (x.T @ u[:, :keep]) / np.sqrt(lam_k)
    modes = modes.T  # (keep, C)
    # sign convention: largest-magnitude entry positive
    flip = modes[np.arange(keep), np.abs(modes).argmax(axis=1)] < 0
    modes[flip] *= -1.0
    stds = np.sqrt(lam_k / (k - 1))
    return PcaModel(mean, modes, stds, lam_k / total, k, encoder_id)


def project(model: PcaModel, c: ConditionVector) -> SubspaceCoords:
    if c.dim != model.dim:
        raise DimMismatch(f"dim {c.dim} != model dim {model.dim}")
    if model.n_modes and model.mode_stds.min() <= 0.0:
        raise DegenerateMode("model has a zero-variance mode")
    centered = c.values.astype(np.float64) - model.mean
    return SubspaceCoords((model.modes @ centered) / model.mode_stds)


def reconstruct(model: PcaModel, coords: SubspaceCoords) -> ConditionVector:
    z = coords.z
    if z.size != model.n_modes:
        raise DimMismatch(f"got {z.size} coords for {model.n_modes} modes")
    vals = model.mean + (z * model.mode_stds) @ model.modes
    return ConditionVector(vals.astype(np.float32), encoder_id=model.encoder_id)


def sample_coords(model: PcaModel, beta: float, rng: SeededRng) -> SubspaceCoords:
    """i.i.d. gaussian standardized coordinates with standard deviation beta."""
    if beta < 0:
        raise InvalidArgument("beta must be >= 0")
    if beta == 0.0:
        return SubspaceCoords(np.zeros(model.n_modes))
    return SubspaceCoords(rng.normals(model.n_modes) * beta)


def interpolate(model: PcaModel, a: ConditionVector, b: ConditionVector, t: float) -> ConditionVector:
    """Linear interpolation in standardized subspace coordinates."""
    if not 0.0 <= t <= 1.0:
        raise InvalidArgument("t must be in [0, 1]")
    za = project(model, a).z
    zb = project(model, b).z
    return reconstruct(model, SubspaceCoords((1.0 - t) * za + t * zb))


# ---------------------------------------------------------------------------
# PCAM binary format
# ---------------------------------------------------------------------------

def write_pcam(model: PcaModel) -> bytes:
    tag = model.encoder_id.encode("ascii")
    if len(tag) > 16:
        raise InvalidArgument("encoder_id longer than 16 bytes")
    return (
        _PCAM_MAGIC
        + struct.pack("<IQQQ", 1, model.dim, model.n_modes, model.k_train)
        + tag.ljust(16, b"\0")
        + model.mean.astype("<f4").tobytes()
        + model.modes.astype("<f4").tobytes()
        + model.mode_stds.astype("<f4").tobytes()
        + model.explained.astype("<f4").tobytes()
    )


def read_pcam(data: bytes) -> PcaModel:
    if data[:4] != _PCAM_MAGIC:
        raise ParseError("bad PCAM magic")
    (version,) = struct.unpack_from("<I", data, 4)
    if version != 1:
        raise ParseError(f"unsupported PCAM version {version}")
    c, d, k = struct.unpack_from("<QQQ", data, 8)
    encoder_id = data[32:48].rstrip(b"\0").decode("ascii")
    off = 48
    need = (c + d * c + 2 * d) * 4
    if len(data) - off < need:
        raise ParseError("truncated PCAM payload")
    mean = np.frombuffer(data, dtype="<f4", count=c, offset=off).astype(np.float64)
    off += 4 * c
    modes = (
        np.frombuffer(data, dtype="<f4", count=d * c, offset=off)
        .astype(np.float64)
        .reshape(d, c)
    )
    off += 4 * d * c
    stds = np.frombuffer(data, dtype="<f4", count=d, offset=off).astype(np.float64)
    off += 4 * d
    explained = np.frombuffer(data, dtype="<f4", count=d, offset=off).astype(np.float64)
    return PcaModel(mean, modes, stds, explained, int(k), encoder_id)
