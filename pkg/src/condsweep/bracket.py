"""Synthetic L-bracket family: a watertight, parameter-continuous stand-in
for a real CAD bracket dataset.

The bracket is an L-shaped cross-section in the (x, z) plane extruded along
y by ``thickness``: two orthogonal slabs (arms) of width 0.4 and length 1.0,
a fillet web rounding the reentrant corner, and one circular through-hole in
each arm. The surface is closed and has genus 2 (Euler characteristic -2).

The cross-section is assembled from five pieces whose shared boundary
vertices are bitwise identical, so welding produces a single crack-free
sheet: around each hole, a rectangle-with-hole annulus is triangulated by
projecting every circle vertex radially onto the rectangle boundary and
stitching wedge strips (fold-free because the rectangle is convex and
contains the hole center); the hole-free remainders of the arms are fans
from a corner; the fillet web is a fan from the reentrant corner over its
arc. Vertex counts are independent of the shape parameters, so small
parameter changes move vertices continuously.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidParams
from .isosurface import TriangleMesh
from .meshtopo import weld
from .rng import SeededRng

ARM_WIDTH = 0.4
ARM_LENGTH = 1.0
HOLE_OFFSET = 0.7  # hole center along each arm
CIRCLE_SEGMENTS = 48
ARC_SEGMENTS = 16
HOLE_MARGIN = 0.02

PARAM_RANGES = {
    "hole_radius": (0.06, 0.16),
    "fillet": (0.02, 0.08),
    "thickness": (0.08, 0.60),
}


def _annulus(lo, hi, center, radius: float, phase: float):
    """Triangulate a rectangle [lo, hi] minus a circular hole around
    ``center``. Returns (verts, CCW tris, edge projections) where the
    projections map edge name -> list of boundary points created on it."""
    cx, cz = center
    theta = phase + 2.0 * np.pi * np.arange(CIRCLE_SEGMENTS) / CIRCLE_SEGMENTS
    inner = np.column_stack([cx + radius * np.cos(theta), cz + radius * np.sin(theta)])

    # radial projection of each circle vertex onto the rectangle boundary
    proj = np.empty_like(inner)
    proj_edge = []
    for k in range(CIRCLE_SEGMENTS):
        dx, dz = np.cos(theta[k]), np.sin(theta[k])
        tx = ((hi[0] if dx > 0 else lo[0]) - cx) / dx if dx != 0.0 else np.inf
        tz = ((hi[1] if dz > 0 else lo[1]) - cz) / dz if dz != 0.0 else np.inf
        if tx <= tz:
            edge = "right" if dx > 0 else "left"
            t = tx
        else:
            edge = "top" if dz > 0 else "bottom"
            t = tz
        proj[k] = (cx + t * dx, cz + t * dz)
        proj_edge.append(edge)

    corners = np.array(
        [[lo[0], lo[1]], [hi[0], lo[1]], [hi[0], hi[1]], [lo[0], hi[1]]]
    )
    ring = np.vstack([proj, corners])
    ang = np.arctan2(ring[:, 1] - cz, ring[:, 0] - cx)
    # cyclic CCW order around the hole center; the wedge walk below only
    # needs consistent ordering, not a particular start
    order = np.argsort(np.mod(ang - theta[0], 2.0 * np.pi), kind="stable")
    ring = ring[order]
    proj_pos = {}
    for pos, orig in enumerate(order):
        if orig < CIRCLE_SEGMENTS:
            proj_pos[int(orig)] = pos

    verts = np.vstack([inner, ring])
    tris = []
    nr = len(ring)
    for k in range(CIRCLE_SEGMENTS):
        k1 = (k + 1) % CIRCLE_SEGMENTS
        p = proj_pos[k]
        p1 = proj_pos[k1]
        pos = p
        while pos != p1:
            nxt = (pos + 1) % nr
            tris.append((k, CIRCLE_SEGMENTS + pos, CIRCLE_SEGMENTS + nxt))
            pos = nxt
        tris.append((k, CIRCLE_SEGMENTS + p1, k1))
    tris = np.array(tris, dtype=np.int64)

    projections = {name: [] for name in ("left", "right", "top", "bottom")}
    for k, name in enumerate(proj_edge):
        projections[name].append(proj[k])
    return verts, tris, projections


def _fan(apex, chain: np.ndarray):
    """CCW fan triangulation of a region star-shaped around ``apex``; the
    chain runs CCW and excludes the apex."""
    verts = np.vstack([[apex], chain])
    tris = np.array(
        [[0, i, i + 1] for i in range(1, len(chain))], dtype=np.int64
    )
    return verts, tris


def _cross_section(hole_radius: float, fillet: float, seed: int):
    """Vertices and CCW triangles of the full L cross-section; pieces share
    bitwise-identical boundary vertices."""
    w, ln, f, r = ARM_WIDTH, ARM_LENGTH, fillet, hole_radius
    cut = HOLE_OFFSET - r - 0.03  # splits each arm into hole part + plain part
    phase = (seed % (1 << 20)) / float(1 << 20) * (2.0 * np.pi / CIRCLE_SEGMENTS)

    pieces = []

    # hole part of arm A (along x), rectangle [cut, ln] x [0, w]
    va, ta, pa = _annulus((cut, 0.0), (ln, w), (HOLE_OFFSET, w / 2.0), r, phase)
    pieces.append((va, ta))
    # hole part of arm B (along z), rectangle [0, w] x [cut, ln]
    vb, tb, pb = _annulus((0.0, cut), (w, ln), (w / 2.0, HOLE_OFFSET), r, phase)
    pieces.append((vb, tb))

    # plain remainder of arm A: fan from (0, 0); its right edge carries the
    # annulus projections so the sheets weld without T-junctions
    a_right = sorted(pa["left"], key=lambda p: p[1])  # ascending z
    chain_a = np.vstack(
        [[cut, 0.0]] + a_right + [[cut, w], [w + f, w], [w, w], [0.0, w]]
    )
    pieces.append(_fan((0.0, 0.0), chain_a))

    # plain remainder of arm B: fan from (0, w); its top edge carries the
    # B-annulus projections
    b_top = sorted(pb["bottom"], key=lambda p: -p[0])  # descending x
    chain_b = np.vstack(
        [[w, w], [w, w + f], [w, cut]] + b_top + [[0.0, cut]]
    )
    pieces.append(_fan((0.0, w), chain_b))

    if f > 0.0:
        # fillet web at the reentrant corner: square bite minus quarter disk
        arc_t = np.linspace(1.5 * np.pi, np.pi, ARC_SEGMENTS + 1)
        arc = np.column_stack(
            [w + f + f * np.cos(arc_t), w + f + f * np.sin(arc_t)]
        )
        arc[0] = [w + f, w]
        arc[-1] = [w, w + f]
        pieces.append(_fan((w, w), arc))

    verts = np.vstack([p[0] for p in pieces])
    offsets = np.cumsum([0] + [len(p[0]) for p in pieces[:-1]])
    tris = np.vstack([t + off for (_, t), off in zip(pieces, offsets)])

    a = verts[tris[:, 0]]
    b = verts[tris[:, 1]]
    c = verts[tris[:, 2]]
    area2 = (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (
        c[:, 0] - a[:, 0]
    )
    if np.any(area2 < 0):
        raise InvalidParams("cross-section triangulation folded; parameters out of range")
    return verts, tris[area2 > 0]


def synth_bracket(hole_radius: float, fillet: float, thickness: float, seed: int = 42) -> TriangleMesh:
    """Watertight genus-2 L-bracket mesh; see module docstring for the
    construction. ``seed`` only rotates the hole tessellation phase."""
    w = ARM_WIDTH
    if not 0.0 < hole_radius <= w / 2.0 - HOLE_MARGIN:
        raise InvalidParams(
            f"hole_radius {hole_radius:g} must be in (0, {w / 2.0 - HOLE_MARGIN:g}] to fit the slab"
        )
    if not 0.0 <= fillet <= 0.24 - hole_radius + 1e-9:
        raise InvalidParams(
            f"fillet {fillet:g} must be in [0, {0.24 - hole_radius:g}] for this hole radius"
        )
    if not 0.0 < thickness <= 1.0:
        raise InvalidParams(f"thickness {thickness:g} must be in (0, 1]")

    v2, t2 = _cross_section(hole_radius, fillet, seed)

    # weld the pieces along their bitwise-identical shared boundary vertices
    flat = weld(
        TriangleMesh(
            np.column_stack([v2[:, 0], np.zeros(len(v2)), v2[:, 1]]), t2
        ),
        0.0,
    )
    v2 = flat.vertices[:, [0, 2]]
    t2 = flat.triangles

    nv = len(v2)
    bottom = np.column_stack([v2[:, 0], np.zeros(nv), v2[:, 1]])
    top = np.column_stack([v2[:, 0], np.full(nv, thickness), v2[:, 1]])
    verts = np.vstack([bottom, top])

    # a 2D-CCW triangle at fixed y faces -y: keep for the bottom cap, flip
    # for the top cap
    tris = [t2, t2[:, [0, 2, 1]] + nv]

    # directed boundary edges (used by exactly one cap triangle) become walls
    edges = np.concatenate([t2[:, [0, 1]], t2[:, [1, 2]], t2[:, [2, 0]]])
    und = np.sort(edges, axis=1)
    view = np.ascontiguousarray(und).view([("a", "i8"), ("b", "i8")])
    _, inv, counts = np.unique(view, return_inverse=True, return_counts=True)
    boundary = edges[counts[inv.ravel()] == 1]
    a, b = boundary[:, 0], boundary[:, 1]
    walls = np.concatenate(
        [
            np.column_stack([b, a, a + nv]),
            np.column_stack([a + nv, b + nv, b]),
        ]
    )
    tris.append(walls)
    return TriangleMesh(verts, np.vstack(tris), welded=True)


def synth_brackets(count: int, seed: int = 42) -> list:
    """Deterministic family of brackets with parameters uniform over
    PARAM_RANGES; member i uses tessellation phase seed ``seed + i``."""
    rng = SeededRng(seed)
    draws = rng.uniforms(3 * count).reshape(count, 3)
    out = []
    for i in range(count):
        params = {
            name: lo + (hi - lo) * draws[i, j]
            for j, (name, (lo, hi)) in enumerate(PARAM_RANGES.items())
        }
        out.append(synth_bracket(seed=seed + i, **params))
    return out
