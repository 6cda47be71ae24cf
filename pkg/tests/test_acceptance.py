"""Acceptance gate: nine criteria, each recorded as one PASS/FAIL summary line.

Run with ``pytest tests/test_acceptance.py -v``; the summary is printed in the
"acceptance criteria" section at the end of the session.
"""

import itertools
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from qavg.bounds import sharpness_probe
from qavg.config import Tolerances
from qavg.experiments import averaging_sweep, decay_stats, delta_ratio, fourier_checks, kernel_sweep, scaled_error
from qavg.ffield import field_from_order
from qavg.grid import GridFunction
from qavg.quadric import (
    count_isotropic_subspaces,
    count_points_closed_form,
    critical_point,
    enumerate_surface,
    hyperbolicity_test,
    make_surface,
)
from qavg.spectral import average, convolve_khat, mean, sigma_inverse_ft_closed, sigma_inverse_ft_direct, surface_data

TOL = Tolerances()


def alternating(d):
    return [(-1) ** k for k in range(d)]


def elliptic(F, d):
    """Alternating pattern with the last coefficient twisted by a non-square."""
    ns = F.elements()[int(np.flatnonzero(F.eta == -1)[0])]
    coeffs = [F((-1) ** k) for k in range(d)]
    coeffs[-1] = coeffs[-1] * ns
    return coeffs


def both_types(q, d):
    F = field_from_order(q)
    hyp, ell = make_surface(F, alternating(d)), make_surface(F, elliptic(F, d))
    assert hyperbolicity_test(hyp) and not hyperbolicity_test(ell)
    return [hyp, ell]


class Clock:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.start


def test_criterion_1_point_counts(record_criterion):
    with Clock() as clk:
        cases = [(q, c) for q in (3, 5) for c in itertools.product((1, -1), repeat=4)]
        cases += [(3, (1, 1, 1, 2)), (3, (1, -1))]
        mismatches = []
        for q, coeffs in cases:
            S = make_surface(field_from_order(q), coeffs)
            if enumerate_surface(S)[1] != count_points_closed_form(S):
                mismatches.append((q, coeffs))
        frozen = {
            (3, (1, -1, 1, -1)): 33,
            (3, (1, 1, 1, 2)): 21,
            (3, (1, -1)): 5,
        }
        frozen_ok = all(enumerate_surface(make_surface(field_from_order(q), c))[1] == n for (q, c), n in frozen.items())
    ok = not mismatches and frozen_ok and clk.seconds < 10
    record_criterion(1, ok, f"{len(cases)} patterns, mismatches={mismatches}, frozen counts ok={frozen_ok}, {clk.seconds:.2f}s < 10s")
    assert ok


def test_criterion_2_sigma_closed_form(record_criterion):
    with Clock() as clk:
        worst = 0.0
        for d in (2, 4, 6):
            for q in (3, 5):
                for S in both_types(q, d):
                    worst = max(worst, scaled_error(sigma_inverse_ft_closed(S).values, sigma_inverse_ft_direct(S).values))
    ok = worst < 1e-8 and clk.seconds < 60
    record_criterion(2, ok, f"max |closed - direct| = {worst:.2e} < 1e-8, {clk.seconds:.2f}s < 60s")
    assert ok


def test_criterion_3_fourier_infrastructure(record_criterion):
    with Clock() as clk:
        rows = []
        for q in (3, 5, 7):
            for d in (2, 4):
                rows += fourier_checks(field_from_order(q), d, trials=100, seed=0, tol=1e-8)
    failed = [(r.q, r.d, r.check, r.value) for r in rows if not r.passed]
    worst = max(r.value for r in rows)
    checks = sorted({r.check for r in rows})
    ok = not failed and clk.seconds < 120 and "fast-vs-naive-forward" in checks
    record_criterion(3, ok, f"{len(rows)} checks over {checks}, worst {worst:.2e} < 1e-8, {clk.seconds:.1f}s < 120s")
    assert ok, failed


def test_criterion_4_kernel_identities(record_criterion):
    rng = np.random.default_rng(4)
    k0_exact = True
    worst_identity = 0.0
    worst_khat = 0.0
    for d in (4, 6):
        for q in (3, 5, 7):
            for S in both_types(q, d):
                data = surface_data(S)
                k0_exact &= data.kernel.values[0] == 0
                worst_khat = max(worst_khat, float(np.abs(data.kernel_hat.values).max()) / q)
                for _ in range(3):
                    N = q**d
                    f = GridFunction(S.field, d, rng.normal(size=N) + 1j * rng.normal(size=N))
                    lhs = average(f, S).values
                    rhs = convolve_khat(f, data).values + mean(f)
                    worst_identity = max(worst_identity, scaled_error(lhs, rhs))
    ok = k0_exact and worst_identity < 1e-9 and worst_khat <= TOL.khat_ceiling
    record_criterion(
        4,
        ok,
        f"K(0) == 0 exactly: {k0_exact}; max |f*dsigma - f*K^ - mean| = {worst_identity:.2e} < 1e-9; "
        f"max ||K^||_inf / q = {worst_khat:.3f} <= {TOL.khat_ceiling} (d in 4,6; q in 3,5,7)",
    )
    assert ok


def test_criterion_5_decay_two_sided(record_criterion):
    lo, hi = math.inf, 0.0
    for d in (4, 6):
        for q in (3, 5, 7):
            for S in both_types(q, d):
                st = decay_stats(S)
                for band in (st.on_dual, st.off_dual):
                    if band is not None:
                        lo, hi = min(lo, band[0]), max(hi, band[1])
    ok = TOL.band_lo <= lo and hi <= TOL.band_hi
    record_criterion(5, ok, f"normalised |(dsigma)^v| in [{lo:.4f}, {hi:.4f}] within [{TOL.band_lo}, {TOL.band_hi}]")
    assert ok


def test_criterion_6_kernel_estimates(record_criterion):
    qs = (3, 5, 7, 11)
    with Clock() as clk:
        sweeps = {}
        for q in qs:
            S = make_surface(field_from_order(q), alternating(4))
            sweeps[q] = kernel_sweep(S, trials=200, seed=0, families=("random_set",))
    c_ii = max(c for q in qs for _, c, _ in sweeps[q].splits)
    c_i1 = max(c for q in qs for _, _, c in sweeps[q].splits)
    trend = {}
    for kind in ("l2", "lcrit"):
        a, b = sweeps[3].max_constant(3, kind), sweeps[11].max_constant(11, kind)
        trend[kind] = (a, b, b <= TOL.trend_factor * a)
    ok = c_ii <= 1 + 1e-9 and c_i1 <= 1 + 1e-9 and all(t[2] for t in trend.values()) and clk.seconds < 600
    parts = [f"EII max C = {c_ii:.4f}", f"EI1 max C = {c_i1:.4f}"]
    for kind, (a, b, good) in trend.items():
        parts.append(f"{kind}: C(11)/C(3) = {b:.4f}/{a:.4f} = {b / a:.3f} {'<=' if good else '>'} 1.5")
    parts.append(f"{clk.seconds:.1f}s < 600s")
    record_criterion(6, ok, "; ".join(parts))
    assert ok


def test_criterion_7_critical_vertex(record_criterion):
    assert critical_point(4) == (Fraction(5, 6), Fraction(1, 3))
    assert critical_point(6) == (Fraction(13, 15), Fraction(1, 5))
    parts, ok = [], True
    for d, qs in ((4, (3, 5, 7, 11)), (6, (3, 5))):
        maxima = averaging_sweep(alternating(d), qs, seeds=(0, 1, 2)).maxima()
        vals = [maxima[q] for q in qs]
        ratios = [b / a for a, b in zip(vals, vals[1:])]
        ok &= max(vals) <= TOL.battery_ceiling
        ok &= all(TOL.band_lo <= r <= TOL.band_hi for r in ratios)
        parts.append(f"d={d} maxima {[round(v, 4) for v in vals]} ratios {[round(r, 4) for r in ratios]}")
    dr = delta_ratio(3, alternating(4), Fraction(6, 5), 3)
    expected = 9 * 33 ** (-2 / 3)
    ok &= abs(dr - expected) < 1e-6
    parts.append(f"delta ratio {dr:.7f} vs 9*33^(-2/3) = {expected:.7f}")
    record_criterion(7, ok, "; ".join(parts))
    assert ok


def test_criterion_8_sharpness(record_criterion):
    with Clock() as clk:
        res = sharpness_probe(alternating(4), (Fraction(4, 5), Fraction(1, 5)), [3, 5, 7, 11])
    slope = res.slopes["subspace"]
    ok = TOL.slope_lo <= slope <= TOL.slope_hi and clk.seconds < 120
    record_criterion(8, ok, f"subspace log_q slope {slope:.4f} in [0.1, 0.3] (analytic 0.2), {clk.seconds:.1f}s < 120s")
    assert ok


def test_criterion_9_hyperbolicity_brute_force(record_criterion):
    with Clock() as clk:
        disagreements, totals = [], set()
        for coeffs in itertools.product((1, 2), repeat=4):
            S = make_surface(field_from_order(3), coeffs)
            hits, total = count_isotropic_subspaces(S)
            totals.add(total)
            if hyperbolicity_test(S) != (hits > 0):
                disagreements.append(coeffs)
    ok = not disagreements and totals == {130} and clk.seconds < 30
    record_criterion(9, ok, f"16 patterns, {sorted(totals)} subspaces each, disagreements={disagreements}, {clk.seconds:.2f}s < 30s")
    assert ok


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
