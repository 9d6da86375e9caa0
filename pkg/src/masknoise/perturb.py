"""The three mask corruption modes.

natural - sample each outer contour, push the sampled vertices along the ray
    from the contour centroid by Gaussian offsets, refill the polygon.
choppy - shift the start and end of every per-row foreground run by rounded
    Gaussian offsets, mimicking cross-plane annotation jaggedness.
random - flip the same fraction of pixels in each class, mimicking
    classification-style label noise.

Every mode is a pure function of (mask, parameter, stream). For the two
boundary modes the parameter is the offset standard deviation in pixels; for
random it is the per-class flip fraction in [0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    OP_CHOPPY,
    OP_NATURAL,
    OP_RANDOM,
    SeedSpec,
    VolumeDataset,
    as_mask,
)
from .core import stream_rng
from .geometry import Polygon, centroid, extract_contours, fill_polygon, sample_contour

__all__ = [
    "MODES",
    "PerturbSpec",
    "perturb_natural",
    "perturb_choppy",
    "perturb_random",
    "perturb_slice",
    "perturb_dataset",
    "natural_plans",
    "apply_natural_plans",
]

MODES = ("natural", "choppy", "random")
DEFAULT_SPACING = 10

OP_TAGS = {"natural": OP_NATURAL, "choppy": OP_CHOPPY, "random": OP_RANDOM}


@dataclass(frozen=True)
class PerturbSpec:
    """Mode + noise parameter + seed: fully determines a perturbation."""

    mode: str
    parameter: float
    seed: SeedSpec
    spacing: int = DEFAULT_SPACING  # natural mode only

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}, expected one of {MODES}")
        if self.parameter < 0:
            raise ValueError("parameter must be non-negative")
        if self.mode == "random" and self.parameter > 1:
            raise ValueError("random-mode flip fraction must be at most 1")
        if self.spacing < 1:
            raise ValueError("spacing must be at least 1")


def _round_half_away(x: np.ndarray) -> np.ndarray:
    """Round to nearest integer, halves away from zero."""
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def _round_count(fraction: float, total: int) -> int:
    return int(np.floor(fraction * total + 0.5))


@dataclass(frozen=True)
class _ContourPlan:
    """Precomputed per-contour geometry for the natural mode.

    `passthrough` holds the pixels of 1-2 pixel specks, which are copied
    unchanged (no meaningful polygon exists for them).
    """

    vertices: np.ndarray | None  # (k, 2) float
    center: np.ndarray | None  # (2,) float
    passthrough: tuple[tuple[int, int], ...] | None


def natural_plans(mask: np.ndarray, spacing: int) -> list[_ContourPlan]:
    """Trace and sample every outer contour once; reusable across sigmas."""
    plans = []
    for contour in extract_contours(mask):
        if len(contour) < 3:
            plans.append(_ContourPlan(None, None, contour.points))
            continue
        poly = sample_contour(contour, spacing)
        plans.append(
            _ContourPlan(
                np.asarray(poly.vertices, dtype=float),
                np.asarray(centroid(contour), dtype=float),
                None,
            )
        )
    return plans


def apply_natural_plans(
    plans: list[_ContourPlan], shape: tuple[int, int], sigma: float, rng: np.random.Generator
) -> np.ndarray:
    """Displace each plan's vertices radially by N(0, sigma^2) and refill.

    One standard-normal vector is drawn per displaced contour, in contour
    scan order; speck contours draw nothing. Per-contour fills are combined
    by union.
    """
    height, width = shape
    out = np.zeros(shape, dtype=bool)
    for plan in plans:
        if plan.passthrough is not None:
            for r, c in plan.passthrough:
                out[r, c] = True
            continue
        offsets = sigma * rng.standard_normal(len(plan.vertices))
        delta = plan.vertices - plan.center
        norm = np.hypot(delta[:, 0], delta[:, 1])
        with np.errstate(divide="ignore", invalid="ignore"):
            unit = np.where(norm[:, None] > 0, delta / norm[:, None], 0.0)
        moved = plan.vertices + offsets[:, None] * unit
        poly = Polygon(tuple((float(r), float(c)) for r, c in moved))
        out |= fill_polygon(poly, width, height)
    return out


def perturb_natural(
    mask: np.ndarray, sigma: float, spacing: int, rng: np.random.Generator
) -> np.ndarray:
    """Natural boundary perturbation (positive offsets point away from center).

    sigma == 0 is an exact identity; the trace/sample/fill path would
    otherwise clip corners between sampled vertices and destroy holes.
    """
    mask = as_mask(mask)
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    if spacing < 1:
        raise ValueError("spacing must be at least 1")
    if sigma == 0:
        return mask.copy()
    return apply_natural_plans(natural_plans(mask, spacing), mask.shape, sigma, rng)


def perturb_choppy(mask: np.ndarray, sigma: float, rng: np.random.Generator) -> np.ndarray:
    """Shift every per-row run [s, e] to [s + d1, e + d2], d ~ round(N(0, sigma^2)).

    Runs whose shifted start exceeds their shifted end vanish; survivors are
    clipped to the row and overlaps merge by union. Draws are consumed as one
    (n_runs, 2) standard-normal block in run scan order, so the underlying
    draws do not depend on sigma.
    """
    mask = as_mask(mask)
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    height, width = mask.shape

    padded = np.zeros((height, width + 2), dtype=np.int8)
    padded[:, 1:-1] = mask
    edges = np.diff(padded, axis=1)
    start_rows, start_cols = np.nonzero(edges == 1)
    _, end_cols = np.nonzero(edges == -1)
    # np.nonzero is row-major, so starts and ends pair up per run in scan order.
    n_runs = len(start_cols)
    if n_runs == 0:
        return mask.copy()

    z = rng.standard_normal((n_runs, 2))
    deltas = _round_half_away(z * sigma).astype(np.int64)
    new_start = start_cols.astype(np.int64) + deltas[:, 0]
    new_end = (end_cols.astype(np.int64) - 1) + deltas[:, 1]

    keep = (new_start <= new_end) & (new_end >= 0) & (new_start <= width - 1)
    rows = start_rows[keep]
    s = np.clip(new_start[keep], 0, width - 1)
    e = np.clip(new_end[keep], 0, width - 1)

    coverage = np.zeros((height, width + 1), dtype=np.int32)
    np.add.at(coverage, (rows, s), 1)
    np.add.at(coverage, (rows, e + 1), -1)
    return coverage[:, :width].cumsum(axis=1) > 0


def perturb_random(mask: np.ndarray, p: float, rng: np.random.Generator) -> np.ndarray:
    """Flip round(p*P) foreground and round(p*N) background pixels.

    Counts round half away from zero. Flip sets are the first k entries of a
    full per-class permutation (foreground first), so for a fixed stream the
    flipped sets are nested across p.
    """
    mask = as_mask(mask)
    if not 0 <= p <= 1:
        raise ValueError("flip fraction must lie in [0, 1]")
    out = mask.copy()
    flat = out.ravel()
    fg = np.flatnonzero(flat)
    bg = np.flatnonzero(~flat)
    k_fg = _round_count(p, fg.size)
    k_bg = _round_count(p, bg.size)
    perm_fg = rng.permutation(fg.size)
    perm_bg = rng.permutation(bg.size)
    flat[fg[perm_fg[:k_fg]]] = False
    flat[bg[perm_bg[:k_bg]]] = True
    return out


def perturb_slice(mask: np.ndarray, spec: PerturbSpec, slice_index: int) -> np.ndarray:
    """Perturb one slice with its (seed, slice_index, mode) stream."""
    rng = stream_rng(spec.seed, slice_index, OP_TAGS[spec.mode])
    if spec.mode == "natural":
        return perturb_natural(mask, spec.parameter, spec.spacing, rng)
    if spec.mode == "choppy":
        return perturb_choppy(mask, spec.parameter, rng)
    return perturb_random(mask, spec.parameter, rng)


def perturb_dataset(ds: VolumeDataset, spec: PerturbSpec) -> VolumeDataset:
    """Apply one perturbation mode to every slice; ids and dimensions persist."""
    slices = [perturb_slice(m, spec, i) for i, m in enumerate(ds.slices)]
    return VolumeDataset(slices, list(ds.slice_ids))
