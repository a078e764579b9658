"""Client side of the external-generator wire protocol.

Messages are newline-delimited JSON over either a subprocess's standard
streams or a TCP socket. Array payloads travel as base64 little-endian
float32. One request is in flight per connection unless the server's
handshake declares ``concurrent: true``.
"""

from __future__ import annotations

import base64
import json
import selectors
import shlex
import socket
import subprocess
import threading
from dataclasses import dataclass

import numpy as np

from .encoder import ConditionVector, GridSpec
from .errors import BackendError, BackendUnavailable, DimMismatch
from .generator import ScalarGrid
from .pointcloud import PointCloud

DEFAULT_TIMEOUT = 30.0


def pack_f32(arr: np.ndarray) -> str:
    return base64.b64encode(np.ascontiguousarray(arr, dtype="<f4").tobytes()).decode("ascii")


def unpack_f32(text: str) -> np.ndarray:
    return np.frombuffer(base64.b64decode(text), dtype="<f4")


@dataclass(frozen=True)
class BackendInfo:
    name: str
    cond_dim: int
    weight_count: int | None
    concurrent: bool


class _StdioTransport:
    def __init__(self, command: str):
        try:
            self._proc = subprocess.Popen(
                shlex.split(command),
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
            )
        except OSError as exc:
            raise BackendUnavailable(f"cannot launch backend: {exc}") from exc
        self._sel = selectors.DefaultSelector()
        self._sel.register(self._proc.stdout, selectors.EVENT_READ)
        self._buf = b""

    def send(self, data: bytes):
        if self._proc.poll() is not None:
            raise BackendUnavailable("backend process exited")
        self._proc.stdin.write(data)
        self._proc.stdin.flush()

    def recv_line(self, timeout: float) -> bytes:
        while b"\n" not in self._buf:
            if not self._sel.select(timeout):
                raise BackendUnavailable(f"backend timed out after {timeout:g} s")
            chunk = self._proc.stdout.read1(1 << 20)
            if not chunk:
                raise BackendUnavailable("backend closed its stdout")
            self._buf += chunk
        line, self._buf = self._buf.split(b"\n", 1)
        return line

    def close(self):
        self._sel.close()
        if self._proc.poll() is None:
            self._proc.stdin.close()
            self._proc.wait(timeout=5)


class _SocketTransport:
    def __init__(self, host: str, port: int):
        try:
            self._sock = socket.create_connection((host, port), timeout=DEFAULT_TIMEOUT)
        except OSError as exc:
            raise BackendUnavailable(f"cannot connect to {host}:{port}: {exc}") from exc
        self._buf = b""

    def send(self, data: bytes):
        self._sock.sendall(data)

    def recv_line(self, timeout: float) -> bytes:
        self._sock.settimeout(timeout)
        while b"\n" not in self._buf:
            try:
                chunk = self._sock.recv(1 << 20)
            except socket.timeout:
                raise BackendUnavailable(f"backend timed out after {timeout:g} s")
            if not chunk:
                raise BackendUnavailable("backend closed the connection")
            self._buf += chunk
        line, self._buf = self._buf.split(b"\n", 1)
        return line

    def close(self):
        self._sock.close()


class ExternalSession:
    """Serialized request/reply session with a protocol server."""

    def __init__(self, transport, timeout: float = DEFAULT_TIMEOUT):
        self._transport = transport
        self._timeout = timeout
        self._lock = threading.Lock()
        self._info: BackendInfo | None = None

    @classmethod
    def from_parameters(cls, parameters: dict) -> "ExternalSession":
        timeout = parameters.get("timeout", DEFAULT_TIMEOUT)
        if "command" in parameters:
            return cls(_StdioTransport(parameters["command"]), timeout)
        if "address" in parameters:
            host, _, port = parameters["address"].rpartition(":")
            return cls(_SocketTransport(host, int(port)), timeout)
        raise BackendUnavailable("external backend needs a command or address")

    def _call(self, request: dict) -> dict:
        with self._lock:
            self._transport.send(json.dumps(request).encode() + b"\n")
            line = self._transport.recv_line(self._timeout)
        try:
            reply = json.loads(line)
        except json.JSONDecodeError as exc:
            raise BackendError(f"malformed reply: {line[:200]!r}") from exc
        if "error" in reply:
            raise BackendError(reply["error"])
        return reply

    def handshake(self) -> BackendInfo:
        if self._info is None:
            reply = self._call({"op": "hello"})
            try:
                self._info = BackendInfo(
                    name=reply["name"],
                    cond_dim=int(reply["cond_dim"]),
                    weight_count=reply.get("weight_count"),
                    concurrent=bool(reply.get("concurrent", False)),
                )
            except KeyError as exc:
                raise BackendError(f"handshake reply missing {exc}: {reply}") from exc
        return self._info

    def remote_encode(self, cloud: PointCloud) -> ConditionVector:
        info = self.handshake()
        reply = self._call(
            {
                "op": "encode",
                "points": pack_f32(cloud.points),
                "count": len(cloud),
            }
        )
        vals = unpack_f32(reply["cond"])
        if int(reply.get("dim", vals.size)) != vals.size or vals.size != info.cond_dim:
            raise DimMismatch(
                f"server sent dim {vals.size}, handshake declared {info.cond_dim}"
            )
        return ConditionVector(vals, encoder_id="external")

    def remote_decode(self, cond: ConditionVector, seed: int, spec: GridSpec) -> ScalarGrid:
        self.handshake()
        reply = self._call(
            {
                "op": "decode",
                "cond": pack_f32(cond.values),
                "seed": int(seed),
                "resolution": spec.resolution,
                "bounds": list(spec.lower) + list(spec.upper),
            }
        )
        vals = unpack_f32(reply["sdf"])
        if int(reply.get("resolution", spec.resolution)) != spec.resolution:
            raise BackendError("server answered with a different resolution")
        if vals.size != spec.resolution ** 3:
            raise BackendError(
                f"grid size {vals.size} != {spec.resolution}^3"
            )
        return ScalarGrid(spec, vals, level=0.0)

    def close(self):
        self._transport.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
