"""Hardy-number estimates for the oracle domains with every estimator.

Usage: python3 scripts/hardy_numbers.py [--samples 100000] [--seed 0]
"""
import argparse
import math
import time

from hardy_extremal.geometry import disk, slit_plane, wedge
from hardy_extremal.harmonic import WosConfig
from hardy_extremal.hardy import TAGS, hardy_number_estimate, starlike_hardy_oracle
from hardy_extremal.profile import ProfileConfig, profile, validate_profile

DOMAINS = {
    "wedge pi/4": wedge(math.pi / 4),
    "wedge pi/2": wedge(math.pi / 2, 0.5 + 0.25j),
    "wedge pi": wedge(math.pi),
    "slit plane": slit_plane([(1 + 0j, 1 + 0j)]),
    "disk r=5": disk(0j, 5.0, 0j),
}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--samples", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    cfg = ProfileConfig(wos=WosConfig(n_samples=args.samples, rng_seed=args.seed))
    print(f"{'domain':12} {'oracle':>7} " + " ".join(f"{t:>11}" for t in TAGS) + "  violations")
    for name, D in DOMAINS.items():
        t = time.perf_counter()
        p = profile(D, cfg)
        est = [hardy_number_estimate(p, tag).h_est for tag in TAGS]
        print(f"{name:12} {starlike_hardy_oracle(D):7.3g} "
              + " ".join(f"{h:11.4g}" for h in est)
              + f"  {len(validate_profile(p))}  ({time.perf_counter() - t:.0f} s)")


if __name__ == "__main__":
    main()
