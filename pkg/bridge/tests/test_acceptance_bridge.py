"""Protocol-conformance acceptance criterion for the bridge."""

import subprocess
import sys
import threading

import numpy as np
import pytest

from condsweep.encoder import GridSpec
from condsweep.errors import BackendError
from condsweep.external import ExternalSession, pack_f32, unpack_f32
from condsweep.generator import GeneratorBackend
from condsweep.pointcloud import PointCloud, fibonacci_sphere
from condsweep.sweep import SweepConfig, run_sweep, to_csv
from condsweep_bridge.mock import DefaultBackend, handle_request, serve_tcp

MOCK_CMD = f"{sys.executable} -m condsweep_bridge"
MIRROR_CMD = MOCK_CMD + " --mode mirror-density --grid 32"


def _stdio_session(command=MOCK_CMD):
    return ExternalSession.from_parameters({"command": command})


def test_protocol_conformance():
    # 1. round-trip payloads through a live stdio server are bit-exact
    rng = np.random.default_rng(0)
    pts = rng.normal(size=(40, 3))
    cloud = PointCloud(pts)
    with _stdio_session() as session:
        info = session.handshake()
        assert info.cond_dim == 64 and not info.concurrent
        cond = session.remote_encode(cloud)
        local = handle_request(
            DefaultBackend(),
            {"op": "encode", "points": pack_f32(pts), "count": len(pts)},
        )
        assert cond.values.tobytes() == unpack_f32(local["cond"]).tobytes()
        cond2 = session.remote_encode(cloud)
        assert cond2.values.tobytes() == cond.values.tobytes()
        grid_a = session.remote_decode(cond, 42, GridSpec(16))
        grid_b = session.remote_decode(cond, 42, GridSpec(16))
        assert grid_a.values.tobytes() == grid_b.values.tobytes()

    # 2. sweep CSV through the mirror mock equals the in-process CSV
    base = dict(n=150, sigma=0.5, steps=10, grid_resolution=32)
    in_process = to_csv(run_sweep(SweepConfig(**base)))
    via_mock = to_csv(
        run_sweep(
            SweepConfig(
                **base,
                backend=GeneratorBackend("external", {"command": MIRROR_CMD}),
            )
        )
    )
    assert via_mock == in_process

    # 3. the primary package never pulls the bridge in
    probe = (
        "import sys, condsweep, condsweep.sweep, condsweep.external; "
        "sys.exit(any('condsweep_bridge' in m for m in sys.modules))"
    )
    assert subprocess.run([sys.executable, "-c", probe]).returncode == 0


def test_default_decode_yields_one_watertight_component():
    from condsweep.isosurface import marching_cubes
    from condsweep.meshtopo import connected_components, is_watertight, weld

    with _stdio_session() as session:
        cond = session.remote_encode(fibonacci_sphere(30))
        grid = session.remote_decode(cond, 42, GridSpec(32))
    mesh = weld(marching_cubes(grid), 0.0)
    assert connected_components(mesh) == 1
    assert is_watertight(mesh)


def test_server_errors_surface_as_backend_errors():
    with _stdio_session() as session:
        with pytest.raises(BackendError, match="empty point cloud"):
            session.remote_encode(PointCloud(np.zeros((0, 3))))
        cond = session.remote_encode(fibonacci_sphere(10))
        with pytest.raises(BackendError, match="unsupported resolution"):
            session.remote_decode(cond, 42, GridSpec(200))


def test_tcp_transport():
    ready = threading.Event()
    port_box = {}

    def _ready(port):
        port_box["port"] = port
        ready.set()

    thread = threading.Thread(
        target=serve_tcp,
        args=(DefaultBackend(), "127.0.0.1", 0),
        kwargs={"ready": _ready, "max_connections": 1},
        daemon=True,
    )
    thread.start()
    assert ready.wait(5)
    session = ExternalSession.from_parameters(
        {"address": f"127.0.0.1:{port_box['port']}"}
    )
    with session:
        assert session.handshake().name == "condsweep-mock"
        cond = session.remote_encode(fibonacci_sphere(12))
        assert cond.dim == 64
    thread.join(5)
