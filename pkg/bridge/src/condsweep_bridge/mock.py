"""Mock external-generator server.

Speaks the newline-delimited JSON wire protocol (base64 little-endian
float32 payloads) over stdio or a TCP socket, one request in flight at a
time. Two personalities:

- ``default``: cond_dim 64; encode echoes the first 64 coordinate values
  zero-padded; decode returns the SDF of a sphere whose radius is derived
  from ``cond[0]``.
- ``mirror-density``: reproduces the harness's in-process analytic density
  backend bit-for-bit, for conformance testing of the transport itself.
"""

from __future__ import annotations

import argparse
import base64
import json
import socket
import sys

import numpy as np

MAX_RESOLUTION = 128


class Fault(Exception):
    """Turned into an ``{"error": ...}`` reply; the connection stays up."""


def pack_f32(arr: np.ndarray) -> str:
    return base64.b64encode(
        np.ascontiguousarray(arr, dtype="<f4").tobytes()
    ).decode("ascii")


def unpack_f32(text: str) -> np.ndarray:
    try:
        return np.frombuffer(base64.b64decode(text), dtype="<f4")
    except (ValueError, TypeError) as exc:
        raise Fault(f"bad float32 payload: {exc}")


def _check_resolution(resolution) -> int:
    g = int(resolution)
    if not 2 <= g <= MAX_RESOLUTION:
        raise Fault(f"unsupported resolution {g}")
    return g


def _bounds(request) -> tuple:
    bounds = request.get("bounds", [-1.25] * 3 + [1.25] * 3)
    if len(bounds) != 6:
        raise Fault("bounds must be [lo_x, lo_y, lo_z, hi_x, hi_y, hi_z]")
    return tuple(float(v) for v in bounds)


class DefaultBackend:
    """Self-contained stand-in for a real model server."""

    name = "condsweep-mock"
    cond_dim = 64
    weight_count = 0

    def encode(self, points: np.ndarray) -> np.ndarray:
        if points.size == 0:
            raise Fault("empty point cloud")
        cond = np.zeros(self.cond_dim, dtype=np.float32)
        head = points.reshape(-1)[: self.cond_dim]
        cond[: head.size] = head
        return cond

    def decode(self, cond, seed, resolution, bounds) -> np.ndarray:
        if cond.size != self.cond_dim:
            raise Fault(f"cond dim {cond.size} != {self.cond_dim}")
        g = _check_resolution(resolution)
        radius = abs(float(cond[0]))
        lo = np.array(bounds[:3])
        hi = np.array(bounds[3:])
        step = (hi - lo) / g
        axes = [lo[a] + (np.arange(g) + 0.5) * step[a] for a in range(3)]
        ix, iy, iz = np.meshgrid(*axes, indexing="ij")
        sdf = np.sqrt(ix**2 + iy**2 + iz**2) - radius
        return sdf.ravel(order="F").astype(np.float32)


class MirrorDensityBackend:
    """Mirrors the in-process analytic density backend bit-for-bit."""

    name = "condsweep-mock-mirror"
    weight_count = 0

    def __init__(self, grid: int, tau: float, bandwidth: float | None):
        from condsweep.encoder import GridSpec

        self._spec = GridSpec(grid)
        self._tau = tau
        self._bandwidth = bandwidth
        self.cond_dim = grid**3

    def encode(self, points: np.ndarray) -> np.ndarray:
        from condsweep.encoder import encode_density
        from condsweep.errors import CondsweepError
        from condsweep.pointcloud import PointCloud

        if points.size == 0:
            raise Fault("empty point cloud")
        try:
            cloud = PointCloud(points.astype(np.float64).reshape(-1, 3))
            return encode_density(cloud, self._spec, self._bandwidth).values
        except CondsweepError as exc:
            raise Fault(str(exc))

    def decode(self, cond, seed, resolution, bounds) -> np.ndarray:
        from condsweep.encoder import ConditionVector, GridSpec
        from condsweep.errors import CondsweepError
        from condsweep.generator import decode_density

        g = _check_resolution(resolution)
        spec = GridSpec(g, bounds[:3], bounds[3:])
        try:
            cv = ConditionVector(cond, encoder_id="density")
            return decode_density(cv, spec, self._tau).values
        except CondsweepError as exc:
            raise Fault(str(exc))


def handle_request(backend, request: dict) -> dict:
    op = request.get("op")
    if op == "hello":
        return {
            "name": backend.name,
            "cond_dim": backend.cond_dim,
            "weight_count": backend.weight_count,
            "concurrent": False,
        }
    if op == "encode":
        cond = backend.encode(unpack_f32(request.get("points", "")))
        return {"cond": pack_f32(cond), "dim": int(cond.size)}
    if op == "decode":
        if "resolution" not in request:
            raise Fault("decode needs a resolution")
        g = _check_resolution(request["resolution"])
        sdf = backend.decode(
            unpack_f32(request.get("cond", "")),
            int(request.get("seed", 0)),
            g,
            _bounds(request),
        )
        return {"sdf": pack_f32(sdf), "resolution": g}
    raise Fault(f"unknown op {op!r}")


def serve_stream(backend, reader, writer):
    """One reply line per request line until EOF."""
    for raw in reader:
        if not raw.strip():
            continue
        try:
            reply = handle_request(backend, json.loads(raw))
        except Fault as exc:
            reply = {"error": str(exc)}
        except json.JSONDecodeError as exc:
            reply = {"error": f"malformed request: {exc}"}
        writer.write(json.dumps(reply).encode("ascii") + b"\n")
        writer.flush()


def serve_tcp(backend, host: str, port: int, ready=None, max_connections=None):
    with socket.create_server((host, port)) as server:
        if ready is not None:
            ready(server.getsockname()[1])
        served = 0
        while max_connections is None or served < max_connections:
            conn, _ = server.accept()
            with conn, conn.makefile("rb") as reader, conn.makefile(
                "wb"
            ) as writer:
                serve_stream(backend, reader, writer)
            served += 1


def build_backend(args):
    if args.mode == "mirror-density":
        return MirrorDensityBackend(args.grid, args.tau, args.bandwidth)
    return DefaultBackend()


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="condsweep-mock", description="mock external-generator server"
    )
    parser.add_argument(
        "--mode", choices=("default", "mirror-density"), default="default"
    )
    parser.add_argument("--grid", type=int, default=32)
    parser.add_argument("--tau", type=float, default=0.35)
    parser.add_argument("--bandwidth", type=float, default=None)
    parser.add_argument(
        "--listen", default=None, metavar="HOST:PORT",
        help="serve over TCP instead of stdio",
    )
    args = parser.parse_args(argv)
    backend = build_backend(args)
    if args.listen is not None:
        host, _, port = args.listen.rpartition(":")
        serve_tcp(backend, host or "127.0.0.1", int(port))
    else:
        serve_stream(backend, sys.stdin.buffer, sys.stdout.buffer)
    return 0


if __name__ == "__main__":
    sys.exit(main())
