"""External-generator protocol adapter: mock server implementations."""

from .mock import (
    DefaultBackend,
    Fault,
    MirrorDensityBackend,
    handle_request,
    pack_f32,
    serve_stream,
    serve_tcp,
    unpack_f32,
)

__all__ = [
    "DefaultBackend",
    "Fault",
    "MirrorDensityBackend",
    "handle_request",
    "pack_f32",
    "serve_stream",
    "serve_tcp",
    "unpack_f32",
]
__version__ = "0.1.0"
