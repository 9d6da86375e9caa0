"""Core types and metrics: binary masks, volume datasets, seeded streams, Dice.

A mask is a plain 2D boolean numpy array indexed (row, col); True marks
foreground. The boolean dtype is the binarity guarantee: no third value is
representable no matter what downstream code does. A dataset bundles aligned
slices with stable string ids.

Randomness contract: every randomized operation consumes a numpy Generator
obtained from `stream_rng`. Stream seeds are a pure blake2b mix of
(global_seed, slice_index, op_tag), so outputs depend only on those values,
never on evaluation order or thread count. The bit generator is pinned to
numpy's PCG64, making runs bit-reproducible for a given numpy version.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "OP_NATURAL",
    "OP_CHOPPY",
    "OP_RANDOM",
    "OP_SYNTH",
    "OP_SAMPLE",
    "ShapeMismatchError",
    "AlignmentError",
    "EmptySampleError",
    "SeedSpec",
    "DiceScore",
    "VolumeDataset",
    "as_mask",
    "stream_seed",
    "stream_rng",
    "dice",
    "mean_slice_dice",
    "pooled_voxel_dice",
]

# Operation tags keep the per-slice streams of different operations disjoint.
OP_NATURAL = 1
OP_CHOPPY = 2
OP_RANDOM = 3
OP_SYNTH = 4
OP_SAMPLE = 5


class ShapeMismatchError(ValueError):
    """Two masks with different dimensions were compared."""


class AlignmentError(ValueError):
    """Two datasets with different slice ids or dimensions were combined."""


class EmptySampleError(ValueError):
    """An aggregate statistic was requested over zero slices."""


def as_mask(pixels) -> np.ndarray:
    """Coerce `pixels` to a validated 2D boolean mask."""
    arr = np.asarray(pixels)
    if arr.ndim != 2:
        raise ValueError(f"mask must be 2D, got shape {arr.shape!r}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"mask must have at least one pixel, got shape {arr.shape!r}")
    return arr.astype(bool, copy=False)


@dataclass(frozen=True)
class SeedSpec:
    """Global seed from which every per-slice stream is derived."""

    global_seed: int

    def __post_init__(self) -> None:
        if not 0 <= int(self.global_seed) < 2**64:
            raise ValueError("global_seed must fit in an unsigned 64-bit integer")


def stream_seed(seed: SeedSpec, slice_index: int, op_tag: int) -> int:
    """Derive the 64-bit stream seed for (seed, slice_index, op_tag).

    Pure and collision-resistant: blake2b over the three values, so distinct
    inputs give distinct outputs with overwhelming probability. Stable across
    platforms and runs.
    """
    h = hashlib.blake2b(digest_size=8)
    h.update(int(seed.global_seed).to_bytes(8, "little"))
    h.update(int(slice_index).to_bytes(8, "little"))
    h.update(int(op_tag).to_bytes(8, "little"))
    return int.from_bytes(h.digest(), "little")


def stream_rng(seed: SeedSpec, slice_index: int, op_tag: int) -> np.random.Generator:
    """PCG64 generator for one (slice, operation) stream; see `stream_seed`."""
    return np.random.Generator(np.random.PCG64(stream_seed(seed, slice_index, op_tag)))


@dataclass(frozen=True)
class DiceScore:
    """Dice-Sorensen agreement between two masks, with the raw counts."""

    value: float
    intersection: int
    size_a: int
    size_b: int


def dice(a: np.ndarray, b: np.ndarray) -> DiceScore:
    """Dice-Sorensen coefficient 2|A∩B| / (|A| + |B|).

    Commutative in (a, b). Two empty masks agree perfectly (value 1.0).
    Raises ShapeMismatchError when dimensions differ.
    """
    a = as_mask(a)
    b = as_mask(b)
    if a.shape != b.shape:
        raise ShapeMismatchError(
            f"mask dimensions differ: {a.shape[1]}x{a.shape[0]} vs {b.shape[1]}x{b.shape[0]}"
        )
    inter = int(np.count_nonzero(a & b))
    size_a = int(np.count_nonzero(a))
    size_b = int(np.count_nonzero(b))
    if size_a + size_b == 0:
        return DiceScore(1.0, 0, 0, 0)
    return DiceScore(2.0 * inter / (size_a + size_b), inter, size_a, size_b)


@dataclass(eq=False)
class VolumeDataset:
    """Ordered stack of same-sized binary masks with stable slice ids.

    Treated as immutable after construction; operations return new datasets.
    """

    slices: list[np.ndarray]
    slice_ids: list[str]
    _index: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if not self.slices:
            raise ValueError("dataset must contain at least one slice")
        if len(self.slices) != len(self.slice_ids):
            raise ValueError("slice_ids and slices must have equal length")
        self.slices = [as_mask(s) for s in self.slices]
        shape = self.slices[0].shape
        for i, s in enumerate(self.slices):
            if s.shape != shape:
                raise ValueError(
                    f"slice {self.slice_ids[i]!r} has shape {s.shape!r}, expected {shape!r}"
                )
        ids = [str(i) for i in self.slice_ids]
        if len(set(ids)) != len(ids):
            raise ValueError("slice_ids must be unique")
        if ids != sorted(ids):
            raise ValueError("slice_ids must be sorted in slice order")
        self.slice_ids = ids
        self._index = {sid: i for i, sid in enumerate(ids)}

    @property
    def height(self) -> int:
        return self.slices[0].shape[0]

    @property
    def width(self) -> int:
        return self.slices[0].shape[1]

    def __len__(self) -> int:
        return len(self.slices)

    def index_of(self, slice_id: str) -> int:
        return self._index[slice_id]

    def get(self, slice_id: str) -> np.ndarray:
        return self.slices[self._index[slice_id]]

    def __eq__(self, other) -> bool:
        if not isinstance(other, VolumeDataset):
            return NotImplemented
        return self.slice_ids == other.slice_ids and all(
            np.array_equal(a, b) for a, b in zip(self.slices, other.slices)
        )


def _check_aligned(a: VolumeDataset, b: VolumeDataset) -> None:
    if a.slice_ids != b.slice_ids:
        raise AlignmentError("datasets have different slice ids")
    if (a.height, a.width) != (b.height, b.width):
        raise AlignmentError(
            f"datasets have different dimensions: {a.width}x{a.height} vs {b.width}x{b.height}"
        )


def _filter_indices(a: VolumeDataset, slice_filter) -> list[int]:
    if slice_filter is None:
        return list(range(len(a)))
    ids = [str(s) for s in slice_filter]
    if not ids:
        raise EmptySampleError("slice filter selects no slices")
    missing = [s for s in ids if s not in a._index]
    if missing:
        raise AlignmentError(f"slice ids not present in dataset: {missing!r}")
    return [a.index_of(s) for s in ids]


def mean_slice_dice(a: VolumeDataset, b: VolumeDataset, slice_filter=None) -> float:
    """Arithmetic mean of per-slice dice over `slice_filter` (default: all).

    This is the primary agreement statistic used by calibration.
    """
    _check_aligned(a, b)
    idx = _filter_indices(a, slice_filter)
    return float(np.mean([dice(a.slices[i], b.slices[i]).value for i in idx]))


def pooled_voxel_dice(a: VolumeDataset, b: VolumeDataset, slice_filter=None) -> float:
    """Dice over the pooled voxels of the selected slices (report statistic)."""
    _check_aligned(a, b)
    idx = _filter_indices(a, slice_filter)
    inter = 0
    size_a = 0
    size_b = 0
    for i in idx:
        d = dice(a.slices[i], b.slices[i])
        inter += d.intersection
        size_a += d.size_a
        size_b += d.size_b
    if size_a + size_b == 0:
        return 1.0
    return 2.0 * inter / (size_a + size_b)
