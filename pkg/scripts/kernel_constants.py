"""Per-regime maxima of the kernel-estimate constants, with the size-one set shown separately.

The size-one constant for the critical norm is explicit:
C = (q^3 / |S|)^(5/6) (1 - |S| / q^4) to leading order at d = 4, which rises
towards 1 as q grows.  This script prints it next to the random-set maxima.
"""

import argparse
import math

from qavg.bounds import kernel_norm_bound_check
from qavg.experiments import kernel_sweep
from qavg.ffield import field_from_order
from qavg.grid import GridFunction
from qavg.quadric import enumerate_surface, make_surface


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--q", default="3,5,7,11")
    ap.add_argument("--coeffs", default="1,-1,1,-1")
    ap.add_argument("--trials", type=int, default=200)
    args = ap.parse_args()

    coeffs = [int(v) for v in args.coeffs.split(",")]
    d = len(coeffs)
    for q in (int(v) for v in args.q.split(",")):
        S = make_surface(field_from_order(q), coeffs)
        sw = kernel_sweep(S, trials=args.trials, families=("random_set",))
        cells = []
        for regime in ("J1", "J2", "J3"):
            cells.append(regime + " " + " ".join(f"{sw.max_constant(q, k, regime):.3f}" for k in ("linf", "l2", "lcrit")))
        delta = kernel_norm_bound_check(GridFunction.delta(S.field, d), S, "lcrit").constant
        n = enumerate_surface(S)[1]
        approx = (q**3 / n) ** (5 / 6) * (1 - n / q**4) if d == 4 else math.nan
        print(f"q={q:3d}  " + "  |  ".join(cells) + f"  |  delta lcrit {delta:.4f} (approx {approx:.4f})")


if __name__ == "__main__":
    main()
