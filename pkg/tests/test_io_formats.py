import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from PIL import Image

from masknoise.calibrate import CalibrationConfig, calibrate
from masknoise.core import SeedSpec, VolumeDataset, mean_slice_dice
from masknoise.io_formats import (
    DatasetFormatError,
    DatasetIntegrityError,
    SliceDecodeError,
    load_dataset,
    save_dataset,
    write_calibration,
    write_report,
)
from masknoise.synthgen import make_circle
from conftest import random_mask

GOLDEN_DIR = Path(__file__).parent / "goldens"


def _dataset(seeds, h=12, w=10):
    return VolumeDataset(
        [random_mask(s, h, w) for s in seeds], [f"{i:04d}" for i in range(len(seeds))]
    )


def test_save_then_load_roundtrip(tmp_path):
    ds = _dataset(range(5))
    save_dataset(ds, tmp_path / "d", provenance="test")
    loaded = load_dataset(tmp_path / "d")
    assert loaded == ds
    assert loaded.slice_ids == ds.slice_ids


@given(st.integers(0, 2**32 - 1), st.integers(1, 6), st.integers(1, 16), st.integers(1, 16))
@settings(max_examples=20, deadline=None)
def test_roundtrip_property(tmp_path_factory, seed, count, h, w):
    ds = VolumeDataset(
        [random_mask(seed + i, h, w) for i in range(count)],
        [f"{i:04d}" for i in range(count)],
    )
    path = tmp_path_factory.mktemp("ds")
    save_dataset(ds, path)
    assert load_dataset(path) == ds


def test_save_writes_expected_files(tmp_path):
    ds = _dataset(range(3))
    save_dataset(ds, tmp_path / "d")
    names = sorted(p.name for p in (tmp_path / "d").iterdir())
    assert names == ["manifest.json", "slice_0000.png", "slice_0001.png", "slice_0002.png"]
    arr = np.asarray(Image.open(tmp_path / "d" / "slice_0000.png"))
    assert set(np.unique(arr)) <= {0, 255}


def test_save_load_save_produces_identical_bytes(tmp_path):
    ds = _dataset(range(4))
    save_dataset(ds, tmp_path / "a")
    save_dataset(load_dataset(tmp_path / "a"), tmp_path / "b")
    for name in ("manifest.json", "slice_0000.png", "slice_0003.png"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_missing_manifest_is_format_error(tmp_path):
    (tmp_path / "d").mkdir()
    with pytest.raises(DatasetFormatError):
        load_dataset(tmp_path / "d")


def test_malformed_manifest_is_format_error(tmp_path):
    (tmp_path / "d").mkdir()
    (tmp_path / "d" / "manifest.json").write_text("{not json")
    with pytest.raises(DatasetFormatError):
        load_dataset(tmp_path / "d")


def test_missing_slice_file_is_integrity_error(tmp_path):
    ds = _dataset(range(3))
    save_dataset(ds, tmp_path / "d")
    (tmp_path / "d" / "slice_0001.png").unlink()
    with pytest.raises(DatasetIntegrityError):
        load_dataset(tmp_path / "d")


def test_dimension_mismatch_is_integrity_error(tmp_path):
    ds = _dataset(range(2))
    save_dataset(ds, tmp_path / "d")
    Image.fromarray(np.zeros((3, 3), np.uint8), mode="L").save(tmp_path / "d" / "slice_0001.png")
    with pytest.raises(DatasetIntegrityError):
        load_dataset(tmp_path / "d")


def test_unreadable_image_names_file(tmp_path):
    ds = _dataset(range(2))
    save_dataset(ds, tmp_path / "d")
    (tmp_path / "d" / "slice_0000.png").write_bytes(b"not a png")
    with pytest.raises(SliceDecodeError, match="slice_0000.png"):
        load_dataset(tmp_path / "d")


def test_grayscale_thresholding(tmp_path):
    d = tmp_path / "d"
    d.mkdir()
    arr = np.array([[0, 100], [128, 255]], np.uint8)
    Image.fromarray(arr, mode="L").save(d / "slice_0000.png")
    manifest = {
        "format_version": 1,
        "width": 2,
        "height": 2,
        "slice_count": 1,
        "slice_files": ["slice_0000.png"],
    }
    (d / "manifest.json").write_text(json.dumps(manifest))
    loaded = load_dataset(d)
    assert np.array_equal(loaded.slices[0], np.array([[False, False], [True, True]]))
    assert loaded.slice_ids == ["slice_0000"]  # ids fall back to file stems


def test_exact_binary_values_roundtrip(tmp_path):
    d = tmp_path / "d"
    d.mkdir()
    arr = np.array([[0, 255], [255, 0]], np.uint8)
    Image.fromarray(arr, mode="L").save(d / "slice_0000.png")
    (d / "manifest.json").write_text(
        json.dumps(
            {
                "format_version": 1,
                "width": 2,
                "height": 2,
                "slice_count": 1,
                "slice_files": ["slice_0000.png"],
                "slice_ids": ["0000"],
            }
        )
    )
    loaded = load_dataset(d)
    assert np.array_equal(loaded.slices[0], arr == 255)


def test_calibration_json_matches_golden(tmp_path):
    circle = make_circle(128, 40)
    ds = VolumeDataset([circle.copy() for _ in range(4)], [f"{i:04d}" for i in range(4)])
    result = calibrate(ds, CalibrationConfig(mode="random", target=0.90, seed=SeedSpec(123)))
    write_calibration(result, tmp_path / "params.json")
    golden = (GOLDEN_DIR / "calibration_uniform_circles.json").read_bytes()
    assert (tmp_path / "params.json").read_bytes() == golden


def test_write_report_empty_rows_is_header_only(tmp_path):
    write_report([], tmp_path / "r.csv")
    assert (tmp_path / "r.csv").read_text() == "slice_id,dice\n"


def test_write_report_mean_matches_mean_slice_dice(tmp_path):
    from masknoise.core import dice

    ds_a = _dataset(range(6))
    ds_b = _dataset(range(50, 56))
    rows = [
        (sid, dice(ds_a.slices[i], ds_b.slices[i]).value)
        for i, sid in enumerate(ds_a.slice_ids)
    ]
    write_report(rows, tmp_path / "r.csv")
    lines = (tmp_path / "r.csv").read_text().splitlines()
    assert lines[0] == "slice_id,dice"
    assert len(lines) == 8
    mean_line = lines[-1]
    assert mean_line.startswith("# mean,")
    assert float(mean_line.split(",")[1]) == mean_slice_dice(ds_a, ds_b)
    # values round-trip exactly through repr
    assert float(lines[1].split(",")[1]) == rows[0][1]
