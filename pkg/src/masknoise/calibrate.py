"""Bisection calibration: solve the noise parameter for a target mean Dice.

The objective is the mean per-slice dice between the originals and the
perturbed copies of a fixed slice sample, with the perturbation streams
fixed by the seed. Fixing both makes the objective a deterministic function
of the parameter, which is what lets bisection honor its terminal condition
(both bracket endpoints within tolerance of the target).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import (
    OP_SAMPLE,
    EmptySampleError,
    SeedSpec,
    VolumeDataset,
    dice,
    stream_rng,
)
from .perturb import (
    MODES,
    OP_TAGS,
    apply_natural_plans,
    natural_plans,
    perturb_choppy,
    perturb_random,
)

__all__ = [
    "DEFAULT_TOLERANCE",
    "DEFAULT_SAMPLE_SIZE",
    "DEFAULT_INITIAL_UPPER",
    "DEFAULT_MAX_ITERATIONS",
    "MAX_EXPANSIONS",
    "CalibrationError",
    "UnreachableTargetError",
    "NonConvergenceError",
    "CalibrationConfig",
    "CalibrationResult",
    "eligible_slices",
    "objective",
    "calibrate",
]

DEFAULT_TOLERANCE = 0.005
DEFAULT_SAMPLE_SIZE = 1000
DEFAULT_INITIAL_UPPER = {"natural": 16.0, "choppy": 16.0, "random": 0.5}
DEFAULT_MAX_ITERATIONS = 60
MAX_EXPANSIONS = 8  # doublings of the upper bound before the target is declared unreachable


class CalibrationError(Exception):
    """Base class for calibration failures; carries the partial result."""

    def __init__(self, message: str, result: "CalibrationResult"):
        super().__init__(message)
        self.result = result


class UnreachableTargetError(CalibrationError):
    """The objective never dropped to the target during bracket expansion."""


class NonConvergenceError(CalibrationError):
    """Iteration budget exhausted before both endpoints entered the band."""


@dataclass(frozen=True)
class CalibrationConfig:
    mode: str
    target: float
    seed: SeedSpec
    tolerance: float = DEFAULT_TOLERANCE
    sample_size: int = DEFAULT_SAMPLE_SIZE
    initial_upper: float | None = None  # None: mode default
    max_iterations: int = DEFAULT_MAX_ITERATIONS
    spacing: int = 10  # natural mode only

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}, expected one of {MODES}")
        if not 0 < self.target < 1:
            raise ValueError("target must lie strictly between 0 and 1")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.sample_size < 1:
            raise ValueError("sample_size must be at least 1")
        if self.initial_upper is not None and self.initial_upper <= 0:
            raise ValueError("initial_upper must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")

    def resolved_initial_upper(self) -> float:
        if self.initial_upper is not None:
            return float(self.initial_upper)
        return DEFAULT_INITIAL_UPPER[self.mode]


@dataclass(frozen=True)
class CalibrationResult:
    """Solved parameter plus the final bracket and its objective values.

    `history` records (lower, upper, lower_dice, upper_dice) after bracket
    expansion and after each bisection step.
    """

    mode: str
    solved_parameter: float | None
    target: float
    achieved: float | None
    tolerance: float
    lower_bound: float
    upper_bound: float
    lower_dice: float
    upper_dice: float
    iterations: int
    sample_slice_ids: tuple[str, ...]
    seed: SeedSpec
    converged: bool
    history: tuple[tuple[float, float, float, float], ...] = field(default=(), repr=False)


def eligible_slices(ds: VolumeDataset) -> list[str]:
    """Ids of slices containing at least one foreground pixel.

    Boundary modes are identities on empty slices, which would dilute the
    calibration objective, so the sampling population excludes them.
    """
    return [sid for sid, m in zip(ds.slice_ids, ds.slices) if m.any()]


class _SampleObjective:
    """Mean dice over a fixed sample, as a deterministic function of the parameter.

    Per-slice streams are keyed by the slice's dataset index, so values do
    not depend on which other slices are in the sample. Natural-mode contour
    plans are traced once and reused across evaluations.
    """

    def __init__(
        self,
        ds: VolumeDataset,
        mode: str,
        sample: tuple[str, ...],
        seed: SeedSpec,
        spacing: int = 10,
    ):
        if mode not in MODES:
            raise ValueError(f"unknown mode {mode!r}")
        if not sample:
            raise EmptySampleError("objective sample is empty")
        self._mode = mode
        self._seed = seed
        self._tag = OP_TAGS[mode]
        self._entries = []
        for sid in sample:
            index = ds.index_of(sid)
            mask = ds.slices[index]
            plans = natural_plans(mask, spacing) if mode == "natural" else None
            self._entries.append((index, mask, plans))

    def __call__(self, parameter: float) -> float:
        values = []
        for index, mask, plans in self._entries:
            rng = stream_rng(self._seed, index, self._tag)
            if self._mode == "natural":
                out = mask if parameter == 0 else apply_natural_plans(plans, mask.shape, parameter, rng)
            elif self._mode == "choppy":
                out = perturb_choppy(mask, parameter, rng)
            else:
                out = perturb_random(mask, parameter, rng)
            values.append(dice(mask, out).value)
        return float(np.mean(values))


def objective(
    ds: VolumeDataset,
    mode: str,
    parameter: float,
    sample,
    seed: SeedSpec,
    spacing: int = 10,
) -> float:
    """Mean per-slice dice of the perturbed sample against the originals."""
    return _SampleObjective(ds, mode, tuple(str(s) for s in sample), seed, spacing)(parameter)


def _draw_sample(eligible: list[str], cfg: CalibrationConfig) -> tuple[str, ...]:
    if cfg.sample_size >= len(eligible):
        return tuple(eligible)
    rng = stream_rng(cfg.seed, 0, OP_SAMPLE)
    picks = rng.choice(len(eligible), size=cfg.sample_size, replace=False)
    return tuple(eligible[i] for i in sorted(picks.tolist()))


def calibrate(ds: VolumeDataset, cfg: CalibrationConfig) -> CalibrationResult:
    """Solve the parameter whose sample mean dice hits cfg.target.

    Bracket [0, upper] starts at the mode's initial upper bound; the upper
    bound doubles (up to MAX_EXPANSIONS times) until its objective falls
    below target - tolerance. Bisection then runs until both endpoints'
    objectives are within tolerance of the target. The solved parameter is
    the final bracket midpoint.

    Raises UnreachableTargetError when expansion cannot push the objective
    down to the target, and NonConvergenceError when the iteration budget
    runs out; both carry the best bracket in `.result`.
    """
    eligible = eligible_slices(ds)
    if not eligible:
        raise EmptySampleError("dataset has no slices with foreground")
    sample = _draw_sample(eligible, cfg)
    f = _SampleObjective(ds, cfg.mode, sample, cfg.seed, cfg.spacing)

    lower, f_lo = 0.0, 1.0  # parameter 0 is an exact identity for every mode
    upper = cfg.resolved_initial_upper()
    f_up = f(upper)
    expansions = 0
    while f_up > cfg.target - cfg.tolerance and expansions < MAX_EXPANSIONS:
        upper *= 2.0
        f_up = f(upper)
        expansions += 1
    history = [(lower, upper, f_lo, f_up)]

    def _result(solved, achieved, iterations, converged):
        return CalibrationResult(
            mode=cfg.mode,
            solved_parameter=solved,
            target=cfg.target,
            achieved=achieved,
            tolerance=cfg.tolerance,
            lower_bound=lower,
            upper_bound=upper,
            lower_dice=f_lo,
            upper_dice=f_up,
            iterations=iterations,
            sample_slice_ids=sample,
            seed=cfg.seed,
            converged=converged,
            history=tuple(history),
        )

    if f_up > cfg.target:
        raise UnreachableTargetError(
            f"objective stayed at {f_up:.6f} > target {cfg.target} after "
            f"{expansions} expansions (upper bound {upper})",
            _result(None, None, 0, False),
        )

    iterations = 0
    while not (abs(f_lo - cfg.target) <= cfg.tolerance and abs(f_up - cfg.target) <= cfg.tolerance):
        if iterations >= cfg.max_iterations:
            solved = 0.5 * (lower + upper)
            raise NonConvergenceError(
                f"terminal condition not met after {iterations} iterations; "
                f"bracket [{lower}, {upper}] with dice [{f_lo:.6f}, {f_up:.6f}]",
                _result(solved, f(solved), iterations, False),
            )
        mid = 0.5 * (lower + upper)
        f_mid = f(mid)
        iterations += 1
        if f_mid >= cfg.target:
            lower, f_lo = mid, f_mid
        else:
            upper, f_up = mid, f_mid
        history.append((lower, upper, f_lo, f_up))

    solved = 0.5 * (lower + upper)
    return _result(solved, f(solved), iterations, True)
