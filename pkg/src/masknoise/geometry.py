"""Pixel-grid geometry: boundary tracing, contour sampling, scanline fill.

Contours are closed loops of foreground pixel coordinates traced with
Moore-neighbor border following (outer boundaries only, one per 8-connected
component). Polygons are real-valued vertex loops; `fill_polygon` rasterizes
them with an even-odd scanline rule that includes boundary pixels, so that
fill(sample(trace(m), 1)) reproduces a hole-free component exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

__all__ = ["Contour", "Polygon", "extract_contours", "centroid", "sample_contour", "fill_polygon"]

_EIGHT_CONNECTED = np.ones((3, 3), dtype=int)

# Moore neighborhood in clockwise ring order, starting west: (row, col) offsets.
_RING = ((0, -1), (-1, -1), (-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1))
_RING_INDEX = {off: i for i, off in enumerate(_RING)}


@dataclass(frozen=True)
class Contour:
    """Closed boundary loop of one foreground component.

    Consecutive points (cyclically) are 8-neighbors; every point is a
    foreground pixel with a background 4-neighbor or lies on the image edge.
    Thin structures may be visited twice (the loop doubles back).
    """

    points: tuple[tuple[int, int], ...]
    orientation: str = "clockwise"

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class Polygon:
    """Closed loop of real-valued (row, col) vertices."""

    vertices: tuple[tuple[float, float], ...]

    def __len__(self) -> int:
        return len(self.vertices)


def _trace_boundary(fg: np.ndarray, start: tuple[int, int]) -> list[tuple[int, int]]:
    """Moore-neighbor trace of the outer boundary containing `start`.

    `start` must be the topmost-leftmost pixel of its component, so its west
    and north neighbors are background. The walk state is (pixel, backtrack);
    the walk is deterministic, so the first repeated state closes the loop
    (Jacob's stop rule generalized to survive thin two-pixel components,
    where the start state itself never recurs).
    """
    height, width = fg.shape
    seen: dict[tuple[int, int, int, int], int] = {}
    seq: list[tuple[int, int]] = []
    cur_r, cur_c = start
    back_r, back_c = start[0], start[1] - 1  # west neighbor: background by start choice

    while (cur_r, cur_c, back_r, back_c) not in seen:
        seen[(cur_r, cur_c, back_r, back_c)] = len(seq)
        seq.append((cur_r, cur_c))
        ring_at = _RING_INDEX[(back_r - cur_r, back_c - cur_c)]
        for step in range(1, 9):
            dr, dc = _RING[(ring_at + step) % 8]
            nr, nc = cur_r + dr, cur_c + dc
            if 0 <= nr < height and 0 <= nc < width and fg[nr, nc]:
                pr, pc = _RING[(ring_at + step - 1) % 8]
                back_r, back_c = cur_r + pr, cur_c + pc
                cur_r, cur_c = nr, nc
                break
        else:
            return [start]  # isolated pixel

    first = seen[(cur_r, cur_c, back_r, back_c)]
    cycle = seq[first:]
    if start in cycle:
        at = cycle.index(start)
        cycle = cycle[at:] + cycle[:at]
    return cycle


def extract_contours(mask: np.ndarray) -> list[Contour]:
    """Outer boundary contour of every 8-connected foreground component.

    Holes are ignored. Contours are listed in scan order of each component's
    topmost-leftmost pixel, and each starts at that pixel.
    """
    fg = np.ascontiguousarray(mask, dtype=bool)
    labels, count = ndimage.label(fg, structure=_EIGHT_CONNECTED)
    if count == 0:
        return []
    flat = labels.ravel()
    values, first_index = np.unique(flat, return_index=True)
    starts = sorted(int(idx) for val, idx in zip(values, first_index) if val != 0)
    width = fg.shape[1]
    contours = []
    for idx in starts:
        start = (idx // width, idx % width)
        contours.append(Contour(tuple(_trace_boundary(fg, start))))
    return contours


def centroid(contour: Contour) -> tuple[float, float]:
    """Arithmetic mean of the contour point coordinates."""
    if not contour.points:
        raise ValueError("contour has no points")
    pts = np.asarray(contour.points, dtype=float)
    mean = pts.mean(axis=0)
    return float(mean[0]), float(mean[1])


def sample_contour(contour: Contour, spacing: int) -> Polygon:
    """Every `spacing`-th contour point, always including point 0.

    The effective stride is clamped so any contour of 3 or more points
    yields at least 3 vertices.
    """
    if spacing < 1:
        raise ValueError("spacing must be at least 1")
    pts = contour.points
    n = len(pts)
    stride = spacing
    if n >= 3:
        stride = max(1, min(spacing, (n - 1) // 2))
    return Polygon(tuple((float(r), float(c)) for r, c in pts[::stride]))


def fill_polygon(polygon: Polygon, width: int, height: int) -> np.ndarray:
    """Rasterize a polygon: even-odd scanline fill plus boundary pixels.

    A pixel is set iff its center (row, col) lies on a polygon edge, or the
    parity of edge crossings strictly to its right is odd (half-open span
    rule [xa, xb) between paired crossings). Vertices may fall outside the
    image; output is clipped. Fewer than 3 vertices yield only the edge
    pixels (isolated points or lines).
    """
    out = np.zeros((height, width), dtype=bool)
    if len(polygon.vertices) == 0:
        return out
    verts = np.asarray(polygon.vertices, dtype=float).reshape(-1, 2)
    r1 = verts[:, 0]
    c1 = verts[:, 1]
    r2 = np.roll(r1, -1)
    c2 = np.roll(c1, -1)

    # Interior: even-odd parity spans per scanline. Crossing positions can
    # overflow to +-inf on near-horizontal edges; clamping them to just
    # outside the column range is exact for integer columns.
    y_lo = max(0, math.ceil(min(max(float(r1.min()), -1.0), float(height))))
    y_hi = min(height - 1, math.floor(min(max(float(r1.max()), -1.0), float(height))))
    if y_lo <= y_hi:
        ys = np.arange(y_lo, y_hi + 1, dtype=float)[:, None]
        crosses = ((r1 <= ys) & (ys < r2)) | ((r2 <= ys) & (ys < r1))
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            xc = c1 + (ys - r1) * (c2 - c1) / (r2 - r1)
        for i in range(y_hi - y_lo + 1):
            row_hits = crosses[i]
            if not row_hits.any():
                continue
            xs = np.clip(np.sort(xc[i, row_hits]), -1.0, float(width))
            for xa, xb in zip(xs[0::2], xs[1::2]):
                a = max(0, math.ceil(xa))
                b = min(width - 1, math.ceil(xb) - 1)
                if a <= b:
                    out[y_lo + i, a : b + 1] = True

    # Boundary: lattice points exactly on an edge (exact collinearity test
    # over the edge's bounding box).
    for i in range(len(verts)):
        er1, ec1, er2, ec2 = float(r1[i]), float(c1[i]), float(r2[i]), float(c2[i])
        rlo = max(0, math.ceil(min(er1, er2)))
        rhi = min(height - 1, math.floor(max(er1, er2)))
        clo = max(0, math.ceil(min(ec1, ec2)))
        chi = min(width - 1, math.floor(max(ec1, ec2)))
        if rlo > rhi or clo > chi:
            continue
        rr = np.arange(rlo, rhi + 1, dtype=float)[:, None]
        cc = np.arange(clo, chi + 1, dtype=float)[None, :]
        on_edge = (cc - ec1) * (er2 - er1) == (rr - er1) * (ec2 - ec1)
        out[rlo : rhi + 1, clo : chi + 1] |= on_edge
    return out
