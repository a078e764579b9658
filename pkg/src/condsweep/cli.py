"""Command-line surface.

Every subcommand is deterministic given its flags plus ``--seed`` (default
42): identical invocations produce byte-identical outputs. Configuration
precedence is flags > ``CONDSWEEP_*`` environment variables > built-in
defaults; e.g. ``--grid`` falls back to ``CONDSWEEP_GRID``.

Files default to stdin/stdout (``-``); binary formats are written to the
underlying byte streams.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import __version__
from .bracket import synth_brackets
from .encoder import (
    GridSpec,
    encode_coords,
    encode_density,
    read_cvbt,
    read_cvec,
    write_cvbt,
    write_cvec,
)
from .errors import CondsweepError, InvalidArgument, ParseError
from .generator import DEFAULT_TAU, GeneratorBackend, decode
from .io import read_obj, read_xyz, write_obj, write_xyz
from .isosurface import marching_cubes
from .meshtopo import euler_characteristic, is_watertight, split, surface_area, weld
from .pointcloud import fibonacci_sphere, perturb_on_sphere, sample_surface, scale_to_box
from .rng import SeededRng
from .subspace import (
    SubspaceCoords,
    interpolate,
    pca_fit,
    read_pcam,
    reconstruct,
    sample_coords,
    write_pcam,
)
from .sweep import SweepConfig, run_sweep, to_csv, to_svg

_CVEC_ENCODERS = {"density": "density", "balls": "coords"}


def _env(name: str, cast, fallback):
    """Default honoring the CONDSWEEP_<NAME> environment variable."""
    raw = os.environ.get("CONDSWEEP_" + name)
    if raw is None:
        return fallback
    try:
        return cast(raw)
    except ValueError:
        raise InvalidArgument(f"bad CONDSWEEP_{name} value {raw!r}")


def _read_bytes(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    with open(path, "rb") as fh:
        return fh.read()


def _write_bytes(path: str, data: bytes):
    if path == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    else:
        with open(path, "wb") as fh:
            fh.write(data)


def _read_text(path: str) -> str:
    return _read_bytes(path).decode("utf-8")


def _write_text(path: str, text: str):
    _write_bytes(path, text.encode("utf-8"))


def _backend_from_args(args) -> GeneratorBackend:
    params = {}
    if args.backend == "density":
        params["tau"] = args.tau
    elif args.backend == "balls":
        if args.radius is not None:
            params["radius"] = args.radius
    elif args.backend == "external":
        if getattr(args, "backend_cmd", None):
            params["command"] = args.backend_cmd
        elif getattr(args, "backend_addr", None):
            params["address"] = args.backend_addr
        else:
            raise InvalidArgument(
                "external backend needs --backend-cmd or --backend-addr"
            )
    return GeneratorBackend(args.backend, params)


def _add_backend_flags(sub, default_grid: int):
    sub.add_argument(
        "--backend",
        choices=("density", "balls", "external"),
        default=_env("BACKEND", str, "density"),
    )
    sub.add_argument("--grid", type=int, default=_env("GRID", int, default_grid))
    sub.add_argument("--tau", type=float, default=_env("TAU", float, DEFAULT_TAU))
    sub.add_argument("--radius", type=float, default=_env("RADIUS", float, None))
    sub.add_argument("--backend-cmd", default=_env("BACKEND_CMD", str, None))
    sub.add_argument("--backend-addr", default=_env("BACKEND_ADDR", str, None))


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="condsweep",
        description="conditioning-space sweeps and PCA subspace sampling",
    )
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    def add(name, **kwargs):
        sub = subs.add_parser(name, **kwargs)
        sub.add_argument("--seed", type=int, default=_env("SEED", int, 42))
        return sub

    p = add("sample-sphere", help="write a Fibonacci sphere lattice as XYZ")
    p.add_argument("--n", type=int, default=_env("N", int, 1000))
    p.add_argument("--out", default="-")

    p = add("perturb", help="gaussian-perturb a unit-sphere cloud, renormalized")
    p.add_argument("--sigma", type=float, default=_env("SIGMA", float, 0.3))
    p.add_argument("--in", dest="infile", default="-")
    p.add_argument("--out", default="-")

    p = add("interp-sweep", help="alpha sweep with per-step component counts")
    p.add_argument("--n", type=int, default=_env("N", int, 1000))
    p.add_argument("--sigma", type=float, default=_env("SIGMA", float, 0.3))
    p.add_argument("--steps", type=int, default=_env("STEPS", int, 100))
    p.add_argument(
        "--persistence", type=int, default=_env("PERSISTENCE", int, 3)
    )
    p.add_argument("--bandwidth", type=float, default=_env("BANDWIDTH", float, None))
    p.add_argument("--out-csv", default="-")
    p.add_argument("--out-svg", default=None)
    p.add_argument("--meshes-dir", default=None)
    _add_backend_flags(p, 64)

    p = add("sample-surface", help="area-weighted surface samples of an OBJ mesh")
    p.add_argument("--points", type=int, default=_env("POINTS", int, 2500))
    p.add_argument("--in", dest="infile", default="-")
    p.add_argument("--out", default="-")

    p = add("encode", help="encode an XYZ cloud to a CVEC conditioning vector")
    p.add_argument(
        "--encoder",
        choices=("density", "coords"),
        default=_env("ENCODER", str, "density"),
    )
    p.add_argument("--grid", type=int, default=_env("GRID", int, 32))
    p.add_argument("--bandwidth", type=float, default=_env("BANDWIDTH", float, None))
    p.add_argument("--in", dest="infile", default="-")
    p.add_argument("--out", default="-")

    p = add("pca-fit", help="fit a PCA subspace over CVEC/CVBT inputs")
    p.add_argument("--dim", type=int, default=_env("DIM", int, 100))
    p.add_argument(
        "--encoder", default=_env("ENCODER", str, "density"),
        help="encoder tag of the training vectors",
    )
    p.add_argument("inputs", nargs="+")
    p.add_argument("--out", default="-")

    p = add("pca-sample", help="draw gaussian subspace samples as a CVBT batch")
    p.add_argument("--beta", type=float, default=_env("BETA", float, 1.0))
    p.add_argument("--count", type=int, default=_env("COUNT", int, 1))
    p.add_argument("--model", required=True)
    p.add_argument("--out", default="-")

    p = add("pca-interp", help="interpolate two vectors inside the subspace")
    p.add_argument("--t", type=float, default=_env("T", float, 0.5))
    p.add_argument("--model", required=True)
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--out", default="-")

    p = add("decode", help="decode a CVEC to a level-set mesh (OBJ)")
    p.add_argument("--in", dest="infile", default="-")
    p.add_argument("--out", default="-")
    _add_backend_flags(p, 32)

    p = add("components", help="connected-component report for an OBJ mesh")
    p.add_argument("--quantum", type=float, default=_env("QUANTUM", float, 0.0))
    p.add_argument("--min-faces", type=int, default=_env("MIN_FACES", int, 1))
    p.add_argument("--in", dest="infile", default="-")

    p = add("synth-brackets", help="write the synthetic bracket family as OBJ")
    p.add_argument("--count", type=int, default=_env("COUNT", int, 381))
    p.add_argument("--out-dir", required=True)

    return parser


def _cmd_sample_sphere(args):
    _write_text(args.out, write_xyz(fibonacci_sphere(args.n)))


def _cmd_perturb(args):
    cloud = read_xyz(_read_text(args.infile), on_unit_sphere=True)
    out = perturb_on_sphere(cloud, args.sigma, SeededRng(args.seed))
    _write_text(args.out, write_xyz(out))


def _cmd_interp_sweep(args):
    config = SweepConfig(
        n=args.n,
        sigma=args.sigma,
        perturb_seed=args.seed,
        decode_seed=args.seed,
        steps=args.steps,
        grid_resolution=args.grid,
        bandwidth=args.bandwidth,
        backend=_backend_from_args(args),
        persistence=args.persistence,
    )
    sink = None
    if args.meshes_dir is not None:
        os.makedirs(args.meshes_dir, exist_ok=True)

        def sink(i, record, mesh):
            path = os.path.join(args.meshes_dir, f"step_{i:04d}.obj")
            _write_text(path, write_obj(mesh))

    result = run_sweep(config, mesh_sink=sink)
    _write_text(args.out_csv, to_csv(result))
    if args.out_svg is not None:
        _write_text(args.out_svg, to_svg(result))


def _cmd_sample_surface(args):
    mesh = read_obj(_read_text(args.infile))
    cloud = sample_surface(mesh, args.points, SeededRng(args.seed))
    _write_text(args.out, write_xyz(cloud))


def _cmd_encode(args):
    cloud = read_xyz(_read_text(args.infile))
    if args.encoder == "density":
        cond = encode_density(cloud, GridSpec(args.grid), args.bandwidth)
    else:
        cond = encode_coords(cloud)
    _write_bytes(args.out, write_cvec(cond))


def _read_condition_file(path: str, encoder_id: str):
    data = _read_bytes(path)
    if data[:4] == b"CVBT":
        return read_cvbt(data, encoder_id=encoder_id)
    if data[:4] == b"CVEC":
        return [read_cvec(data, encoder_id=encoder_id)]
    raise ParseError(f"{path}: neither CVEC nor CVBT")


def _cmd_pca_fit(args):
    conds = []
    for path in args.inputs:
        conds.extend(_read_condition_file(path, args.encoder))
    model = pca_fit(conds, args.dim)
    _write_bytes(args.out, write_pcam(model))


def _cmd_pca_sample(args):
    model = read_pcam(_read_bytes(args.model))
    rng = SeededRng(args.seed)
    conds = [
        reconstruct(model, sample_coords(model, args.beta, rng))
        for _ in range(args.count)
    ]
    _write_bytes(args.out, write_cvbt(conds))


def _cmd_pca_interp(args):
    model = read_pcam(_read_bytes(args.model))
    a = read_cvec(_read_bytes(args.a), encoder_id=model.encoder_id)
    b = read_cvec(_read_bytes(args.b), encoder_id=model.encoder_id)
    _write_bytes(args.out, write_cvec(interpolate(model, a, b, args.t)))


def _cmd_decode(args):
    backend = _backend_from_args(args)
    encoder_id = _CVEC_ENCODERS.get(args.backend, "external")
    cond = read_cvec(_read_bytes(args.infile), encoder_id=encoder_id)
    grid = decode(backend, cond, args.seed, GridSpec(args.grid))
    mesh = weld(marching_cubes(grid), 0.0)
    _write_text(args.out, write_obj(mesh))


def _cmd_components(args):
    mesh = weld(read_obj(_read_text(args.infile)), args.quantum)
    parts = [p for p in split(mesh) if p.num_triangles >= args.min_faces]
    lines = [f"components={len(parts)}"]
    for i, part in enumerate(parts):
        lines.append(
            "component=%d vertices=%d faces=%d watertight=%s euler=%d area=%.9g"
            % (
                i,
                part.num_vertices,
                part.num_triangles,
                "true" if is_watertight(part) else "false",
                euler_characteristic(part),
                surface_area(part),
            )
        )
    sys.stdout.write("\n".join(lines) + "\n")


def _cmd_synth_brackets(args):
    os.makedirs(args.out_dir, exist_ok=True)
    for i, mesh in enumerate(synth_brackets(args.count, args.seed)):
        path = os.path.join(args.out_dir, f"bracket_{i:04d}.obj")
        _write_text(path, write_obj(mesh))


_COMMANDS = {
    "sample-sphere": _cmd_sample_sphere,
    "perturb": _cmd_perturb,
    "interp-sweep": _cmd_interp_sweep,
    "sample-surface": _cmd_sample_surface,
    "encode": _cmd_encode,
    "pca-fit": _cmd_pca_fit,
    "pca-sample": _cmd_pca_sample,
    "pca-interp": _cmd_pca_interp,
    "decode": _cmd_decode,
    "components": _cmd_components,
    "synth-brackets": _cmd_synth_brackets,
}


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        _COMMANDS[args.command](args)
    except CondsweepError as exc:
        msg = str(exc).replace("\n", " ")
        print(f"error: {type(exc).__name__}: {msg}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: OSError: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
