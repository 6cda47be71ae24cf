"""Normalised Fourier decay of the surface measure, on and off the dual surface."""

import argparse

from qavg.experiments import decay_stats
from qavg.ffield import field_from_order
from qavg.quadric import hyperbolicity_test, make_surface


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--d", default="4,6")
    ap.add_argument("--q", default="3,5,7")
    args = ap.parse_args()

    print(f"{'d':>2} {'q':>3} {'type':>10}  {'on-dual min':>11} {'on-dual max':>11}  {'off min':>8} {'off max':>8}")
    for d in (int(v) for v in args.d.split(",")):
        for q in (int(v) for v in args.q.split(",")):
            F = field_from_order(q)
            ns = [c for c in F.elements() if F.eta[c.index] == -1][0]
            alt = [F((-1) ** k) for k in range(d)]
            for coeffs in (alt, alt[:-1] + [alt[-1] * ns]):
                S = make_surface(F, coeffs)
                st = decay_stats(S)
                on = st.on_dual or (float("nan"), float("nan"))
                kind = "hyperbolic" if hyperbolicity_test(S) else "elliptic"
                print(f"{d:2d} {q:3d} {kind:>10}  {on[0]:11.4f} {on[1]:11.4f}  {st.off_dual[0]:8.4f} {st.off_dual[1]:8.4f}")


if __name__ == "__main__":
    main()
