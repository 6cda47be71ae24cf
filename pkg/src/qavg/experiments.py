"""Verification sweeps shared by the CLI and the acceptance suite."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .bounds import (
    BoundReport,
    averaging_ratio,
    battery,
    extremizer_family,
    kernel_l2_split,
    kernel_norm_bound_check,
    lp_norm,
    regime_classify,
)
from .ffield import FieldSpec, field_from_order
from .grid import GridFunction, Side, coords, dot
from .quadric import (
    QuadraticSurface,
    count_points_closed_form,
    critical_point,
    enumerate_surface,
    make_surface,
)
from .spectral import (
    NAIVE_LIMIT,
    average,
    dual_form_values,
    forward_transform,
    inverse_transform,
    sigma_inverse_ft_closed,
    sigma_inverse_ft_direct,
    surface_data,
)

IDENTITY_TOL = 1e-8


def scaled_error(a, b) -> float:
    """max |a - b| divided by max(1, largest magnitude involved)."""
    a, b = np.asarray(a), np.asarray(b)
    scale = max(1.0, float(np.max(np.abs(a), initial=0.0)), float(np.max(np.abs(b), initial=0.0)))
    return float(np.max(np.abs(a - b), initial=0.0)) / scale


@dataclass
class CheckRow:
    q: int
    d: int
    coeffs: str
    check: str
    lhs: str
    rhs: str
    status: str
    value: float
    tolerance: float

    HEADER = ("q", "d", "coeffs", "check", "lhs", "rhs", "status", "value", "tolerance")

    @property
    def passed(self) -> bool:
        return self.status in ("pass", "exact-match", "reported")

    def row(self) -> tuple[str, ...]:
        return (
            str(self.q),
            str(self.d),
            self.coeffs,
            self.check,
            self.lhs,
            self.rhs,
            self.status,
            format(self.value, ".17g"),
            format(self.tolerance, ".17g"),
        )


def rows_to_csv(rows: Sequence[CheckRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CheckRow.HEADER)
    for r in rows:
        w.writerow(r.row())
    return buf.getvalue()


def _tol_row(q, d, coeffs, check, value, tol) -> CheckRow:
    return CheckRow(q, d, coeffs, check, "", "", "pass" if value < tol else "fail", value, tol)


# ---------------------------------------------------------------------------
# Fourier infrastructure
# ---------------------------------------------------------------------------


def orthogonality_error(F: FieldSpec, d: int, sample: int = 256, seed: int = 0) -> float:
    """max over sampled m of |sum_x chi(m.x) - q^d [m = 0]|, scaled by q^d at m = 0."""
    X = coords(F, d)
    N = len(X)
    rng = np.random.default_rng(seed)
    ms = np.arange(N) if N <= sample else np.concatenate([[0], rng.choice(np.arange(1, N), sample, replace=False)])
    worst = 0.0
    for m in ms:
        total = complex(F.chi[dot(F, X, X[m][None, :])].sum())
        if m == 0:
            worst = max(worst, abs(total - N) / N)
        else:
            worst = max(worst, abs(total))
    return worst


def _random_grid(F, d, rng, side=Side.SPACE) -> GridFunction:
    N = F.q**d
    return GridFunction(F, d, rng.normal(size=N) + 1j * rng.normal(size=N), side)


def fourier_checks(F: FieldSpec, d: int, trials: int = 100, seed: int = 0, tol: float = IDENTITY_TOL) -> list[CheckRow]:
    q = F.q
    rng = np.random.default_rng(seed)
    planch = roundtrip = fwd = inv = 0.0
    naive = q**d <= NAIVE_LIMIT
    for _ in range(trials):
        f = _random_grid(F, d, rng)
        fh = forward_transform(f)
        lhs = float(np.sum(np.abs(fh.values) ** 2))
        rhs = float(np.sum(np.abs(f.values) ** 2)) / q**d
        planch = max(planch, abs(lhs - rhs) / max(1.0, rhs))
        roundtrip = max(roundtrip, scaled_error(inverse_transform(fh).values, f.values))
        if naive:
            g = _random_grid(F, d, rng, Side.FREQ)
            fwd = max(fwd, scaled_error(fh.values, forward_transform(f, "naive").values))
            inv = max(inv, scaled_error(inverse_transform(g).values, inverse_transform(g, "naive").values))
    delta_hat = scaled_error(inverse_transform(GridFunction.delta(F, d, Side.FREQ)).values, 1.0)
    rows = [
        _tol_row(q, d, "", "orthogonality", orthogonality_error(F, d, seed=seed), tol),
        _tol_row(q, d, "", "plancherel", planch, tol),
        _tol_row(q, d, "", "round-trip", roundtrip, tol),
        _tol_row(q, d, "", "delta-hat", delta_hat, tol),
    ]
    if naive:
        rows.append(_tol_row(q, d, "", "fast-vs-naive-forward", fwd, tol))
        rows.append(_tol_row(q, d, "", "fast-vs-naive-inverse", inv, tol))
    return rows


# ---------------------------------------------------------------------------
# surface measure
# ---------------------------------------------------------------------------


def _coeff_label(S: QuadraticSurface) -> str:
    return ";".join(str(c) for c in S.coeffs)


@dataclass
class DecayStats:
    on_dual: tuple[float, float] | None  # (min, max) of |(dsigma)^v| q^((d-2)/2), m != 0 on the dual surface
    off_dual: tuple[float, float]  # (min, max) of |(dsigma)^v| q^(d/2) off it
    ko_max: float  # max_{m != 0} |(dsigma)^v| q^((d-2)/2)
    max_imag: float


def decay_stats(S: QuadraticSurface) -> DecayStats:
    q, d = S.field.q, S.d
    sig = surface_data(S).sigma_check.values
    mag = np.abs(sig)
    on = dual_form_values(S) == 0
    on[0] = False
    off = dual_form_values(S) != 0
    a = mag[on] * q ** ((d - 2) / 2)
    b = mag[off] * q ** (d / 2)
    return DecayStats(
        (float(a.min()), float(a.max())) if a.size else None,
        (float(b.min()), float(b.max())),
        float(mag[1:].max() * q ** ((d - 2) / 2)),
        float(np.abs(sig.imag).max()),
    )


def sigma_checks(S: QuadraticSurface, tol: float = IDENTITY_TOL, band=(0.5, 2.0)) -> list[CheckRow]:
    q, d, label = S.field.q, S.d, _coeff_label(S)
    _, enumerated = enumerate_surface(S)
    closed = count_points_closed_form(S)
    status = "exact-match" if enumerated == closed else "mismatch"
    rows = [CheckRow(q, d, label, "point-count", str(enumerated), str(closed), status, float(enumerated - closed), 0.0)]
    direct = sigma_inverse_ft_direct(S)
    disc = scaled_error(direct.values, sigma_inverse_ft_closed(S).values)
    rows.append(_tol_row(q, d, label, "sigma-closed-vs-direct", disc, tol))
    rows.append(_tol_row(q, d, label, "sigma-at-origin", abs(direct.values[0] - 1), tol))
    if d >= 4:
        st = decay_stats(S)
        lo, hi = band
        for name, rng_ in (("decay-on-dual", st.on_dual), ("decay-off-dual", st.off_dual)):
            if rng_ is None:
                continue
            ok = lo <= rng_[0] and rng_[1] <= hi
            rows.append(
                CheckRow(q, d, label, name, format(rng_[0], ".17g"), format(rng_[1], ".17g"), "pass" if ok else "fail", rng_[1], hi)
            )
        rows.append(
            CheckRow(q, d, label, "ko-bound", format(st.ko_max, ".17g"), "2", "pass" if st.ko_max <= 2 else "fail", st.ko_max, 2.0)
        )
        rows.append(CheckRow(q, d, label, "max-imag-part", "", "", "reported", st.max_imag, 0.0))
    return rows


# ---------------------------------------------------------------------------
# kernel bounds
# ---------------------------------------------------------------------------


def regime_ranges(d: int, q: int) -> dict[str, tuple[int, int]]:
    N = q**d
    lo = math.isqrt(q ** (d - 2))
    hi = math.isqrt(q**d)
    return {"J1": (1, lo), "J2": (lo + 1, hi), "J3": (hi + 1, N)}


@dataclass
class KernelSweep:
    reports: list[BoundReport]
    splits: list[tuple[int, float, float]]  # (q, c_ii, c_i1)

    def max_constant(self, q: int, kind: str, regime: str | None = None) -> float:
        vals = [
            r.constant
            for r in self.reports
            if r.q == q and r.experiment.endswith("-" + kind) and (regime is None or r.regime == regime)
        ]
        return max(vals) if vals else 0.0


def kernel_sweep(
    S: QuadraticSurface,
    trials: int = 200,
    seed: int = 0,
    linf_ceiling: float = 2.5,
    families: Sequence[str] = ("random_set", "delta", "subspace", "sublevel"),
    kinds: Sequence[str] = ("linf", "l2", "lcrit"),
) -> KernelSweep:
    """``trials`` random sets per size regime plus the indicator families of the battery."""
    q, d = S.field.q, S.d
    data = surface_data(S)
    rng = np.random.default_rng([seed, q, d])
    N = q**d
    sets: list[tuple[str, int | None, GridFunction]] = []
    for regime, (a, b) in regime_ranges(d, q).items():
        if a > b or "random_set" not in families:
            continue
        for t in range(trials):
            n = int(rng.integers(a, b + 1))
            E = GridFunction.indicator(S.field, d, rng.choice(N, size=n, replace=False))
            sets.append((f"random_set:{regime}", t, E))
    indicator_families = [f for f in families if f in ("delta", "subspace", "sublevel")]
    if indicator_families:
        sets.extend(battery(S, families=indicator_families))
    reports, splits = [], []
    for label, s, E in sets:
        for kind in kinds:
            ceiling = linf_ceiling if kind == "linf" else math.inf
            reports.append(kernel_norm_bound_check(E, S, kind, data=data, ceiling=ceiling, family=label, seed=s))
        sp = kernel_l2_split(E, S, data)
        splits.append((q, sp.c_ii, sp.c_i1))
    return KernelSweep(reports, splits)


# ---------------------------------------------------------------------------
# averaging at the critical vertex
# ---------------------------------------------------------------------------


@dataclass
class AveragingSweep:
    point: tuple[Fraction, Fraction]
    reports: list[BoundReport] = field(default_factory=list)

    def maxima(self) -> dict[int, float]:
        out: dict[int, float] = {}
        for r in self.reports:
            out[r.q] = max(out.get(r.q, 0.0), r.constant)
        return out


def averaging_sweep(
    coeffs: Sequence[int],
    q_list: Sequence[int],
    seeds: Sequence[int] = (0, 1, 2),
    point: tuple | None = None,
    ceiling: float = 4.0,
    families=None,
) -> AveragingSweep:
    d = len(coeffs)
    x, y = point if point is not None else critical_point(d)
    x, y = Fraction(x), Fraction(y)
    p = math.inf if x == 0 else float(1 / x)
    r = math.inf if y == 0 else float(1 / y)
    sweep = AveragingSweep((x, y))
    for q in q_list:
        S = make_surface(field_from_order(q), coeffs)
        kw = {} if families is None else {"families": families}
        for label, s, f in battery(S, seeds=seeds, **kw):
            num, den = lp_norm(average(f, S), r), lp_norm(f, p)
            size = int(np.count_nonzero(f.values))
            sweep.reports.append(
                BoundReport.build(
                    q=q,
                    d=d,
                    coeffs=S.coeffs,
                    experiment="averaging",
                    family=label,
                    size=size,
                    regime=regime_classify(d, q, size),
                    lhs=num,
                    rhs=den,
                    ceiling=ceiling,
                    seed=s,
                )
            )
    return sweep


def delta_ratio(q: int, coeffs: Sequence[int], p, r) -> float:
    S = make_surface(field_from_order(q), coeffs)
    return averaging_ratio(extremizer_family("delta", S), S, p, r)
