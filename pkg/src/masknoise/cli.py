"""Command-line interface: synth, apply, calibrate, dice, sweep.

Exit codes: 0 success, 1 usage error, 2 data/format error, 3 non-convergence.
All randomized subcommands take explicit seeds; identical flags produce
byte-identical artifacts.
"""

from __future__ import annotations

import argparse
import json
import sys

from .calibrate import (
    DEFAULT_MAX_ITERATIONS,
    DEFAULT_SAMPLE_SIZE,
    DEFAULT_TOLERANCE,
    CalibrationConfig,
    CalibrationError,
    calibrate,
)
from .core import (
    AlignmentError,
    EmptySampleError,
    SeedSpec,
    ShapeMismatchError,
    dice,
    mean_slice_dice,
    pooled_voxel_dice,
)
from .io_formats import DatasetIOError, load_dataset, save_dataset, write_calibration, write_report
from .perturb import DEFAULT_SPACING, MODES, PerturbSpec, perturb_dataset
from .synthgen import ShapeSpec, make_dataset

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NONCONVERGENCE = 3


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors by default; the contract here is 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _perturb_provenance(spec: PerturbSpec) -> str:
    return json.dumps(
        {
            "mode": spec.mode,
            "parameter": spec.parameter,
            "spacing": spec.spacing,
            "seed": spec.seed.global_seed,
        },
        sort_keys=True,
    )


def cmd_synth(args) -> int:
    spec = ShapeSpec(
        kind=args.kind,
        size=args.size,
        radius=args.radius,
        count=args.count,
        irregularity=args.irregularity,
        seed=SeedSpec(args.seed),
    )
    ds = make_dataset(spec)
    provenance = json.dumps(
        {
            "kind": spec.kind,
            "size": spec.size,
            "radius": spec.radius,
            "count": spec.count,
            "irregularity": spec.irregularity,
            "seed": spec.seed.global_seed,
        },
        sort_keys=True,
    )
    save_dataset(ds, args.out, provenance=provenance)
    print(f"slices={len(ds)} width={ds.width} height={ds.height} out={args.out}")
    return EXIT_OK


def cmd_apply(args) -> int:
    ds = load_dataset(args.in_dir)
    spec = PerturbSpec(
        mode=args.mode, parameter=args.param, seed=SeedSpec(args.seed), spacing=args.spacing
    )
    out = perturb_dataset(ds, spec)
    save_dataset(out, args.out, provenance=_perturb_provenance(spec))
    mean = mean_slice_dice(ds, out)
    print(f"mean_dice={mean:.6f}")
    return EXIT_OK


def cmd_calibrate(args) -> int:
    ds = load_dataset(args.in_dir)
    cfg = CalibrationConfig(
        mode=args.mode,
        target=args.target,
        seed=SeedSpec(args.seed),
        tolerance=args.tolerance,
        sample_size=args.sample,
        initial_upper=args.initial_upper,
        max_iterations=args.max_iterations,
        spacing=args.spacing,
    )
    try:
        result = calibrate(ds, cfg)
    except CalibrationError as exc:
        write_calibration(exc.result, args.out)
        print(f"masknoise calibrate: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    write_calibration(result, args.out)
    print(
        f"mode={result.mode} solved_parameter={result.solved_parameter!r} "
        f"achieved={result.achieved:.6f} iterations={result.iterations}"
    )
    return EXIT_OK


def cmd_dice(args) -> int:
    ds_a = load_dataset(args.a)
    ds_b = load_dataset(args.b)
    mean = mean_slice_dice(ds_a, ds_b)
    if args.out:
        rows = [
            (sid, dice(ds_a.slices[i], ds_b.slices[i]).value)
            for i, sid in enumerate(ds_a.slice_ids)
        ]
        write_report(rows, args.out)
    print(f"mean_dice={mean:.6f}")
    print(f"pooled_dice={pooled_voxel_dice(ds_a, ds_b):.6f}")
    return EXIT_OK


def _write_scatter_svg(points, path, title: str) -> None:
    """Minimal self-contained scatter plot: parameter (x) vs mean dice (y)."""
    width, height, margin = 640, 480, 60
    x_max = max((p for p, _ in points), default=1.0)
    if x_max <= 0:
        x_max = 1.0
    x_span = width - 2 * margin
    y_span = height - 2 * margin

    def sx(p):
        return margin + x_span * (p / x_max)

    def sy(d):
        return height - margin - y_span * d  # dice axis fixed to [0, 1]

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="24" text-anchor="middle" font-size="16">{title}</text>',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
        f'y2="{height - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{height - margin}" stroke="black"/>',
        f'<text x="{width / 2:.1f}" y="{height - 16}" text-anchor="middle" '
        f'font-size="12">parameter</text>',
        f'<text x="18" y="{height / 2:.1f}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 18 {height / 2:.1f})">mean dice</text>',
    ]
    for tick in (0.0, 0.5, 1.0):
        parts.append(
            f'<text x="{margin - 8}" y="{sy(tick) + 4:.1f}" text-anchor="end" '
            f'font-size="11">{tick:.1f}</text>'
        )
    for tick in (0.0, x_max):
        parts.append(
            f'<text x="{sx(tick):.1f}" y="{height - margin + 16}" text-anchor="middle" '
            f'font-size="11">{tick:.4g}</text>'
        )
    for p, d in points:
        parts.append(f'<circle cx="{sx(p):.2f}" cy="{sy(d):.2f}" r="4" fill="steelblue"/>')
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts))
        fh.write("\n")


def cmd_sweep(args) -> int:
    ds = load_dataset(args.in_dir)
    try:
        params = [float(p) for p in args.params.split(",") if p.strip() != ""]
    except ValueError:
        raise ValueError(f"--params must be a comma-separated list of numbers: {args.params!r}")
    if not params:
        raise ValueError("--params selects no parameters")
    if args.seeds < 1:
        raise ValueError("--seeds must be at least 1")
    rows = []
    for param in params:
        for seed in range(args.seeds):
            spec = PerturbSpec(
                mode=args.mode, parameter=param, seed=SeedSpec(seed), spacing=args.spacing
            )
            rows.append((param, seed, mean_slice_dice(ds, perturb_dataset(ds, spec))))
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        fh.write("mode,parameter,seed,mean_dice\n")
        for param, seed, mean in rows:
            fh.write(f"{args.mode},{param!r},{seed},{mean!r}\n")
    if args.svg:
        _write_scatter_svg([(p, m) for p, _, m in rows], args.svg, f"{args.mode} perturbation")
    print(f"rows={len(rows)} out={args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="masknoise", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("synth", help="generate a synthetic mask dataset")
    p.add_argument("--kind", choices=("circle", "blob"), required=True)
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--radius", type=float, required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--irregularity", type=float, default=0.2)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("apply", help="perturb a dataset with one mode")
    p.add_argument("--mode", choices=MODES, required=True)
    p.add_argument("--param", type=float, required=True)
    p.add_argument("--spacing", type=int, default=DEFAULT_SPACING)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--in", dest="in_dir", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_apply)

    p = sub.add_parser("calibrate", help="solve the parameter for a target mean dice")
    p.add_argument("--mode", choices=MODES, required=True)
    p.add_argument("--target", type=float, required=True)
    p.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE)
    p.add_argument("--sample", type=int, default=DEFAULT_SAMPLE_SIZE)
    p.add_argument("--spacing", type=int, default=DEFAULT_SPACING)
    p.add_argument("--initial-upper", type=float, default=None)
    p.add_argument("--max-iterations", type=int, default=DEFAULT_MAX_ITERATIONS)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--in", dest="in_dir", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("dice", help="per-slice agreement between two datasets")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_dice)

    p = sub.add_parser("sweep", help="mean dice across a parameter/seed grid")
    p.add_argument("--mode", choices=MODES, required=True)
    p.add_argument("--params", required=True, help="comma-separated parameter list")
    p.add_argument("--seeds", type=int, required=True, help="number of seeds (0..n-1)")
    p.add_argument("--spacing", type=int, default=DEFAULT_SPACING)
    p.add_argument("--in", dest="in_dir", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--svg", default=None)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DatasetIOError, ShapeMismatchError, AlignmentError, EmptySampleError) as exc:
        print(f"masknoise: {exc}", file=sys.stderr)
        return EXIT_DATA
    except CalibrationError as exc:
        print(f"masknoise: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except ValueError as exc:
        print(f"masknoise: {exc}", file=sys.stderr)
        return EXIT_USAGE


def run() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    run()
