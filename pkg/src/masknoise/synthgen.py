"""Synthetic mask generators: circles and star-convex random blobs.

Blobs perturb a circle's radius with a few smoothed random harmonics, which
keeps every shape simply connected (single outer contour, no holes) - a
clean substrate for boundary-perturbation tests and demos.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import OP_SYNTH, SeedSpec, VolumeDataset, stream_rng

__all__ = ["ShapeSpec", "make_circle", "make_blob", "make_dataset"]

_HARMONICS = (2, 3, 4, 5, 6, 7)
_MAX_WOBBLE = 0.4  # cap on relative radius modulation, keeps blobs star-convex and fat


@dataclass(frozen=True)
class ShapeSpec:
    """Recipe for a deterministic synthetic dataset."""

    kind: str  # "circle" or "blob"
    size: int
    radius: float
    count: int = 1
    irregularity: float = 0.2  # blob only; 0 degenerates to a circle
    seed: SeedSpec = SeedSpec(0)

    def __post_init__(self) -> None:
        if self.kind not in ("circle", "blob"):
            raise ValueError(f"unknown shape kind {self.kind!r}")
        if self.size < 1:
            raise ValueError("size must be positive")
        if not 0 <= self.radius < self.size / 2:
            raise ValueError(f"radius must satisfy 0 <= radius < size/2, got {self.radius}")
        if self.count < 1:
            raise ValueError("count must be at least 1")
        if self.irregularity < 0:
            raise ValueError("irregularity must be non-negative")


def make_circle(size: int, radius: float, center: tuple[int, int] | None = None) -> np.ndarray:
    """Closed disk: pixel (r, c) is foreground iff (r-cr)^2 + (c-cc)^2 <= radius^2."""
    if center is None:
        center = (size // 2, size // 2)
    cr, cc = center
    if radius < 0:
        raise ValueError("radius must be non-negative")
    if cr - radius < 0 or cc - radius < 0 or cr + radius > size - 1 or cc + radius > size - 1:
        raise ValueError(
            f"circle of radius {radius} at ({cr}, {cc}) does not fit in a {size}x{size} image"
        )
    rr = np.arange(size, dtype=float)[:, None] - cr
    cc_off = np.arange(size, dtype=float)[None, :] - cc
    return rr * rr + cc_off * cc_off <= float(radius) * float(radius)


def make_blob(spec: ShapeSpec, slice_index: int) -> np.ndarray:
    """Star-convex blob: radius(theta) = radius * (1 + clamped harmonic noise).

    Deterministic per (spec.seed, slice_index). Harmonic amplitudes scale
    with spec.irregularity and decay with harmonic order; the summed wobble
    is clamped so the boundary stays smooth at pixel scale.
    """
    rng = stream_rng(spec.seed, slice_index, OP_SYNTH)
    orders = np.asarray(_HARMONICS, dtype=float)
    amps = rng.standard_normal(len(_HARMONICS)) * spec.irregularity / orders
    phases = rng.uniform(0.0, 2.0 * np.pi, len(_HARMONICS))

    center = spec.size // 2
    rr = np.arange(spec.size, dtype=float)[:, None] - center
    cc = np.arange(spec.size, dtype=float)[None, :] - center
    theta = np.arctan2(rr, cc)
    wobble = np.zeros_like(theta)
    for k, a, ph in zip(orders, amps, phases):
        wobble += a * np.cos(k * theta + ph)
    wobble = np.clip(wobble, -_MAX_WOBBLE, _MAX_WOBBLE)
    r_theta = np.minimum(spec.radius * (1.0 + wobble), spec.size / 2 - 1)
    return rr * rr + cc * cc <= r_theta * r_theta


def make_dataset(spec: ShapeSpec) -> VolumeDataset:
    """Dataset of `spec.count` shapes with zero-padded numeric slice ids."""
    slices = []
    for i in range(spec.count):
        if spec.kind == "circle":
            slices.append(make_circle(spec.size, spec.radius))
        else:
            slices.append(make_blob(spec, i))
    ids = [f"{i:04d}" for i in range(spec.count)]
    return VolumeDataset(slices, ids)
