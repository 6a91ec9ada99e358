"""Splitting estimator against the sector closed form, radius by radius.

Usage: python3 scripts/splitting_check.py [--opening 1.5707963] [--samples 100000]
"""
import argparse
import math
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from hardy_extremal.geometry import wedge  # noqa: E402
from hardy_extremal.harmonic import WosConfig  # noqa: E402
from hardy_extremal.profile import ProfileConfig, profile  # noqa: E402
from oracles import sector_level_measure  # noqa: E402


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--opening", type=float, default=math.pi / 2)
    ap.add_argument("--samples", type=int, default=100_000)
    args = ap.parse_args()
    w0 = 0.5 * complex(math.cos(args.opening / 4), math.sin(args.opening / 4))
    p = profile(wedge(args.opening, w0), ProfileConfig(wos=WosConfig(n_samples=args.samples)))
    print(f"{'r':>10} {'omega*':>11} {'exact':>11} {'z':>6}")
    for row in p.rows:
        exact = sector_level_measure(w0, row.r, args.opening)
        z = (row.omega_star.mean - exact) / row.omega_star.std_err
        print(f"{row.r:10.4g} {row.omega_star.mean:11.4e} {exact:11.4e} {z:+6.2f}")


if __name__ == "__main__":
    main()
