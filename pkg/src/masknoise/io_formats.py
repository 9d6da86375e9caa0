"""Persistence: PNG slices + JSON manifest per dataset, calibration JSON, dice CSV.

Directory layout: `manifest.json` plus one 8-bit grayscale PNG per slice
(`slice_0000.png`, zero-padded width 4, 0 = background, 255 = foreground).
The manifest is written last so a partial save is detectable. On load, any
pixel value above 127 maps to foreground; that thresholding is the only
lossy step and only affects foreign files.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .core import VolumeDataset
from .calibrate import CalibrationResult

__all__ = [
    "FORMAT_VERSION",
    "MANIFEST_NAME",
    "DatasetIOError",
    "DatasetFormatError",
    "DatasetIntegrityError",
    "SliceDecodeError",
    "save_dataset",
    "load_dataset",
    "write_calibration",
    "calibration_to_dict",
    "write_report",
]

FORMAT_VERSION = 1
MANIFEST_NAME = "manifest.json"
_THRESHOLD = 127


class DatasetIOError(Exception):
    """Base class for dataset persistence failures."""


class DatasetFormatError(DatasetIOError):
    """Manifest missing or malformed."""


class DatasetIntegrityError(DatasetIOError):
    """Manifest and slice files disagree (missing file, wrong dimensions)."""


class SliceDecodeError(DatasetIOError):
    """A slice image could not be decoded."""


def save_dataset(ds: VolumeDataset, path, provenance: str | None = None) -> None:
    """Write one PNG per slice, then the manifest (atomicity marker)."""
    directory = Path(path)
    directory.mkdir(parents=True, exist_ok=True)
    names = []
    for i, mask in enumerate(ds.slices):
        name = f"slice_{i:04d}.png"
        img = Image.fromarray(np.where(mask, 255, 0).astype(np.uint8), mode="L")
        img.save(directory / name, format="PNG")
        names.append(name)
    manifest = {
        "format_version": FORMAT_VERSION,
        "width": ds.width,
        "height": ds.height,
        "slice_count": len(ds),
        "slice_files": names,
        "slice_ids": list(ds.slice_ids),
        "provenance": provenance,
    }
    with open(directory / MANIFEST_NAME, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_dataset(path) -> VolumeDataset:
    """Load a dataset directory written by `save_dataset` (or compatible)."""
    directory = Path(path)
    manifest_path = directory / MANIFEST_NAME
    if not manifest_path.is_file():
        raise DatasetFormatError(f"no {MANIFEST_NAME} in {directory}")
    try:
        with open(manifest_path, encoding="utf-8") as fh:
            manifest = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DatasetFormatError(f"unreadable manifest {manifest_path}: {exc}") from exc

    try:
        width = int(manifest["width"])
        height = int(manifest["height"])
        count = int(manifest["slice_count"])
        files = list(manifest["slice_files"])
    except (KeyError, TypeError, ValueError) as exc:
        raise DatasetFormatError(f"manifest {manifest_path} missing fields: {exc}") from exc
    if len(files) != count:
        raise DatasetIntegrityError(
            f"manifest lists {len(files)} slice files but slice_count is {count}"
        )
    ids = manifest.get("slice_ids")
    if ids is None:
        ids = [Path(name).stem for name in files]

    slices = []
    for name in files:
        slice_path = directory / name
        if not slice_path.is_file():
            raise DatasetIntegrityError(f"slice file listed in manifest is missing: {slice_path}")
        try:
            with Image.open(slice_path) as img:
                arr = np.asarray(img.convert("L"))
        except (OSError, UnidentifiedImageError, ValueError) as exc:
            raise SliceDecodeError(f"cannot decode slice image {slice_path}: {exc}") from exc
        if arr.shape != (height, width):
            raise DatasetIntegrityError(
                f"{slice_path} is {arr.shape[1]}x{arr.shape[0]}, manifest says {width}x{height}"
            )
        slices.append(arr > _THRESHOLD)
    try:
        return VolumeDataset(slices, [str(i) for i in ids])
    except ValueError as exc:
        raise DatasetFormatError(f"invalid dataset in {directory}: {exc}") from exc


def calibration_to_dict(result: CalibrationResult) -> dict:
    """JSON-ready view of a calibration result (fixed field names)."""
    return {
        "mode": result.mode,
        "solved_parameter": result.solved_parameter,
        "target": result.target,
        "achieved": result.achieved,
        "tolerance": result.tolerance,
        "lower_bound": result.lower_bound,
        "upper_bound": result.upper_bound,
        "lower_dice": result.lower_dice,
        "upper_dice": result.upper_dice,
        "iterations": result.iterations,
        "sample_slice_ids": list(result.sample_slice_ids),
        "seed": result.seed.global_seed,
        "converged": result.converged,
    }


def write_calibration(result: CalibrationResult, path) -> None:
    """Write a calibration result as a JSON document."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(calibration_to_dict(result), fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_report(rows, path) -> None:
    """Per-slice dice CSV: header `slice_id,dice`, then a mean summary comment.

    `rows` is an iterable of (slice_id, dice_value). Numbers are serialized
    with full round-trip precision. Empty rows produce a header-only file.
    """
    rows = list(rows)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("slice_id,dice\n")
        for slice_id, value in rows:
            fh.write(f"{slice_id},{float(value)!r}\n")
        if rows:
            mean = float(np.mean([v for _, v in rows]))
            fh.write(f"# mean,{mean!r}\n")
