"""Controlled corruption of binary segmentation masks, with Dice-targeted calibration.

Three perturbation modes (natural boundary waves, choppy row-block shifts,
random class-balanced flips) plus a bisection calibrator that solves each
mode's noise parameter for a target mean Dice-Sorensen agreement.
"""

from .core import (
    AlignmentError,
    DiceScore,
    EmptySampleError,
    SeedSpec,
    ShapeMismatchError,
    VolumeDataset,
    dice,
    mean_slice_dice,
    pooled_voxel_dice,
    stream_rng,
    stream_seed,
)
from .geometry import Contour, Polygon, centroid, extract_contours, fill_polygon, sample_contour
from .perturb import (
    MODES,
    PerturbSpec,
    perturb_choppy,
    perturb_dataset,
    perturb_natural,
    perturb_random,
)
from .calibrate import (
    CalibrationConfig,
    CalibrationError,
    CalibrationResult,
    NonConvergenceError,
    UnreachableTargetError,
    calibrate,
    eligible_slices,
    objective,
)
from .synthgen import ShapeSpec, make_blob, make_circle, make_dataset
from .io_formats import load_dataset, save_dataset, write_calibration, write_report

__version__ = "0.1.0"
