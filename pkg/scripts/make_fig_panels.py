#!/usr/bin/env python3
"""Render the four-panel circle demo: unperturbed, natural, choppy, random.

Writes one PNG per panel plus a panel_dice.csv with the agreement of each
perturbed panel against the clean circle. Fixed seeds make the output
byte-stable, which is how the repo's golden fixtures were recorded:

    python scripts/make_fig_panels.py --out tests/goldens
"""

import argparse
import sys
from pathlib import Path

import numpy as np
from PIL import Image

from masknoise.core import OP_CHOPPY, OP_NATURAL, OP_RANDOM, SeedSpec, dice, stream_rng
from masknoise.perturb import perturb_choppy, perturb_natural, perturb_random
from masknoise.synthgen import make_circle


def save_panel(mask, path):
    Image.fromarray(np.where(mask, 255, 0).astype(np.uint8), mode="L").save(path, format="PNG")


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", required=True)
    parser.add_argument("--size", type=int, default=512)
    parser.add_argument("--radius", type=float, default=100.0)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--natural-sigma", type=float, default=6.0)
    parser.add_argument("--spacing", type=int, default=10)
    parser.add_argument("--choppy-sigma", type=float, default=6.0)
    parser.add_argument("--random-p", type=float, default=0.03)
    args = parser.parse_args(argv)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    seed = SeedSpec(args.seed)
    circle = make_circle(args.size, args.radius)

    panels = {
        "panel_unperturbed": circle,
        "panel_natural": perturb_natural(
            circle, args.natural_sigma, args.spacing, stream_rng(seed, 0, OP_NATURAL)
        ),
        "panel_choppy": perturb_choppy(circle, args.choppy_sigma, stream_rng(seed, 0, OP_CHOPPY)),
        "panel_random": perturb_random(circle, args.random_p, stream_rng(seed, 0, OP_RANDOM)),
    }
    rows = []
    for name, mask in panels.items():
        save_panel(mask, out / f"{name}.png")
        value = dice(circle, mask).value
        rows.append((name, value))
        print(f"{name}: dice={value:.6f}")
    with open(out / "panel_dice.csv", "w", encoding="utf-8") as fh:
        fh.write("panel,dice\n")
        for name, value in rows:
            fh.write(f"{name},{value!r}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
