"""Growth of the subspace and delta ratios at exponent pairs outside the region.

Scans points on the segment from the critical vertex towards (1, 0) and fits
the log_q slope of each extremizer ratio.

    python scripts/sharpness_scan.py --q 3,5,7,11 --steps 6
"""

import argparse
from fractions import Fraction

from qavg.bounds import sharpness_probe
from qavg.quadric import classify_point, critical_point, region_for


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--d", type=int, default=4)
    ap.add_argument("--q", default="3,5,7,11")
    ap.add_argument("--steps", type=int, default=6)
    args = ap.parse_args()

    qs = [int(v) for v in args.q.split(",")]
    coeffs = [(-1) ** k for k in range(args.d)]
    R = region_for(args.d, hyperbolic=True)
    cx, cy = critical_point(args.d)
    print(f"{'1/p':>8} {'1/r':>8}  {'subspace':>9} {'delta':>9}")
    for i in range(1, args.steps + 1):
        t = Fraction(i, 2 * args.steps)
        pt = (cx + t * (1 - cx), cy * (1 - t))
        if classify_point(R, pt) != "outside":
            continue
        res = sharpness_probe(coeffs, pt, qs)
        print(f"{str(pt[0]):>8} {str(pt[1]):>8}  {res.slopes['subspace']:9.4f} {res.slopes['delta']:9.4f}")


if __name__ == "__main__":
    main()
