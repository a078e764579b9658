"""Desk-scale harness for conditioning-space interpolation sweeps and
PCA-subspace shape sampling over pluggable shape generators."""

from .bracket import PARAM_RANGES, synth_bracket, synth_brackets
from .encoder import (
    ConditionVector,
    GridSpec,
    encode_coords,
    encode_density,
    read_cvbt,
    read_cvec,
    write_cvbt,
    write_cvec,
)
from .generator import (
    GeneratorBackend,
    ScalarGrid,
    decode,
    decode_balls,
    decode_density,
    fill_enclosed_voids,
)
from .io import read_obj, read_ply, read_xyz, write_obj, write_ply, write_xyz
from .isosurface import EMPTY_MESH, TriangleMesh, marching_cubes, voxel_components
from .meshtopo import (
    connected_components,
    euler_characteristic,
    is_watertight,
    split,
    surface_area,
    weld,
)
from .pointcloud import (
    PointCloud,
    fibonacci_sphere,
    perturb_on_sphere,
    sample_surface,
    scale_to_box,
    slerp_cloud,
    slerp_point,
)
from .rng import SeededRng
from .subspace import (
    PcaModel,
    SubspaceCoords,
    interpolate,
    pca_fit,
    project,
    read_pcam,
    reconstruct,
    sample_coords,
    write_pcam,
)
from .sweep import SweepConfig, SweepRecord, SweepResult, detect_alpha_star, replicate_sweep, run_sweep

__version__ = "0.1.0"
