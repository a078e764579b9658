"""Interpolation sweep orchestration: walk alpha from 0 to 1, measure mesh
connectivity at every step, and locate the critical alpha where the
component count persistently leaves 1."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .encoder import ConditionVector, GridSpec, encode_coords, encode_density
from .errors import CondsweepError, InvalidArgument
from .generator import GeneratorBackend, decode
from .isosurface import marching_cubes, voxel_components
from .meshtopo import connected_components, is_watertight, split, weld
from .pointcloud import PointCloud, fibonacci_sphere, perturb_on_sphere, slerp_cloud
from .rng import SeededRng

CSV_HEADER = "alpha,components,watertight_components,vertices,faces,oracle_components"


@dataclass(frozen=True)
class SweepRecord:
    alpha: float
    components: int
    watertight_components: int
    vertices: int
    faces: int
    oracle_components: int | None = None


@dataclass(frozen=True)
class SweepConfig:
    n: int = 1000
    sigma: float = 0.3
    perturb_seed: int = 42
    decode_seed: int = 42
    steps: int = 100
    grid_resolution: int = 64
    lower: tuple = (-1.25, -1.25, -1.25)
    upper: tuple = (1.25, 1.25, 1.25)
    bandwidth: float | None = None  # None: 1.5 voxel edges
    backend: GeneratorBackend = field(
        default_factory=lambda: GeneratorBackend("density", {"tau": 0.35})
    )
    persistence: int = 3

    def grid_spec(self) -> GridSpec:
        return GridSpec(self.grid_resolution, self.lower, self.upper)


@dataclass(frozen=True)
class SweepResult:
    records: tuple
    alpha_star: float | None
    config: SweepConfig

    def __post_init__(self):
        alphas = [r.alpha for r in self.records]
        if alphas != sorted(set(alphas)) or alphas[0] != 0.0 or alphas[-1] != 1.0:
            raise InvalidArgument("records must cover [0, 1] with increasing alpha")


def _encode_for_backend(cloud: PointCloud, backend: GeneratorBackend, spec: GridSpec,
                        bandwidth: float) -> ConditionVector:
    if backend.backend_id == "density":
        return encode_density(cloud, spec, bandwidth)
    if backend.backend_id == "balls":
        return encode_coords(cloud)
    from .external import ExternalSession

    session = backend.parameters.get("session")
    if session is None:
        session = ExternalSession.from_parameters(backend.parameters)
        backend.parameters["session"] = session
    return session.remote_encode(cloud)


def _step(cloud: PointCloud, config: SweepConfig, alpha: float):
    spec = config.grid_spec()
    bandwidth = config.bandwidth if config.bandwidth is not None else spec.default_bandwidth()
    try:
        cond = _encode_for_backend(cloud, config.backend, spec, bandwidth)
        grid = decode(config.backend, cond, config.decode_seed, spec)
    except CondsweepError as exc:
        raise type(exc)(f"alpha={alpha:.6f}: {exc}") from exc
    mesh = weld(marching_cubes(grid), 0.0)
    comps = connected_components(mesh)
    wt = sum(1 for part in split(mesh) if is_watertight(part))
    record = SweepRecord(
        alpha=alpha,
        components=comps,
        watertight_components=wt,
        vertices=mesh.num_vertices,
        faces=mesh.num_triangles,
        oracle_components=voxel_components(grid),
    )
    return record, mesh


def sweep_step(cloud: PointCloud, config: SweepConfig, alpha: float) -> SweepRecord:
    return _step(cloud, config, alpha)[0]


def run_sweep(config: SweepConfig, mesh_sink=None) -> SweepResult:
    """Full sweep; ``mesh_sink(step_index, record, mesh)`` is called per step
    when given (used by the CLI to dump per-step meshes)."""
    if config.steps < 2:
        raise InvalidArgument("steps must be >= 2")
    a = fibonacci_sphere(config.n)
    b = perturb_on_sphere(a, config.sigma, SeededRng(config.perturb_seed))
    records = []
    for i, alpha in enumerate(np.linspace(0.0, 1.0, config.steps)):
        cloud = slerp_cloud(a, b, float(alpha))
        record, mesh = _step(cloud, config, float(alpha))
        records.append(record)
        if mesh_sink is not None:
            mesh_sink(i, record, mesh)
    star = detect_alpha_star(records, config.persistence)
    return SweepResult(tuple(records), star, config)


def detect_alpha_star(records, persistence: int = 3) -> float | None:
    """Smallest alpha opening a run of ``persistence`` consecutive records
    with at least 2 components; None when no such run exists."""
    if persistence < 1:
        raise InvalidArgument("persistence must be >= 1")
    counts = [r.components for r in records]
    for i in range(len(counts) - persistence + 1):
        if all(c >= 2 for c in counts[i : i + persistence]):
            return records[i].alpha
    return None


def replicate_sweep(config: SweepConfig, seeds) -> tuple:
    """Independent sweeps over perturbation (and decode) seeds; returns the
    per-seed results and the min/median/max of the detected alpha stars."""
    seeds = list(seeds)
    if not seeds:
        raise InvalidArgument("need at least one seed")
    results = [
        run_sweep(replace(config, perturb_seed=s, decode_seed=s)) for s in seeds
    ]
    stars = [r.alpha_star for r in results if r.alpha_star is not None]
    dispersion = None
    if stars:
        dispersion = {
            "min": float(min(stars)),
            "median": float(np.median(stars)),
            "max": float(max(stars)),
        }
    return results, dispersion


def to_csv(result: SweepResult) -> str:
    lines = [CSV_HEADER]
    for r in result.records:
        oracle = "" if r.oracle_components is None else str(r.oracle_components)
        lines.append(
            f"{r.alpha:.6f},{r.components},{r.watertight_components},"
            f"{r.vertices},{r.faces},{oracle}"
        )
    return "\n".join(lines) + "\n"


def to_svg(result: SweepResult, width: int = 640, height: int = 400) -> str:
    """Components vs alpha as a single labeled polyline."""
    ml, mr, mt, mb = 60, 20, 20, 50
    pw, ph = width - ml - mr, height - mt - mb
    counts = [r.components for r in result.records]
    cmax = max(max(counts), 1)
    pts = " ".join(
        f"{ml + r.alpha * pw:.2f},{mt + ph - r.components / cmax * ph:.2f}"
        for r in result.records
    )
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{ml}" y1="{mt + ph}" x2="{ml + pw}" y2="{mt + ph}" stroke="black"/>',
        f'<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{mt + ph}" stroke="black"/>',
        f'<text x="{ml + pw / 2:.0f}" y="{height - 12}" text-anchor="middle">alpha</text>',
        f'<text x="18" y="{mt + ph / 2:.0f}" text-anchor="middle" '
        f'transform="rotate(-90 18 {mt + ph / 2:.0f})">connected components</text>',
        f'<text x="{ml}" y="{mt + ph + 16}" text-anchor="middle">0</text>',
        f'<text x="{ml + pw}" y="{mt + ph + 16}" text-anchor="middle">1</text>',
        f'<text x="{ml - 6}" y="{mt + 4}" text-anchor="end">{cmax}</text>',
        f'<text x="{ml - 6}" y="{mt + ph + 4}" text-anchor="end">0</text>',
        f'<polyline points="{pts}" fill="none" stroke="#1f77b4" stroke-width="1.5"/>',
        "</svg>",
    ]
    return "\n".join(parts) + "\n"
