"""Norms, averaging ratios, level sets, and the kernel-norm certification."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .ffield import field_from_order
from .grid import GridFunction, Side, coords, write_atomic
from .quadric import (
    QuadraticSurface,
    UnsupportedDimensionError,
    classify_point,
    hyperbolicity_test,
    isotropic_subspace,
    make_surface,
    region_for,
)
from .spectral import (
    SurfaceData,
    average,
    convolve_khat,
    dual_form_values,
    forward_transform,
    surface_data,
)

__all__ = [
    "NotHyperbolicError",
    "ProbeMeaninglessError",
    "lp_norm",
    "averaging_ratio",
    "LevelDecomposition",
    "level_decompose",
    "regime_classify",
    "BoundReport",
    "kernel_norm_bound_check",
    "L2Split",
    "kernel_l2_split",
    "extremizer_family",
    "battery",
    "SharpnessResult",
    "sharpness_probe",
    "fit_log_slope",
    "write_reports",
]


class NotHyperbolicError(ValueError):
    pass


class ProbeMeaninglessError(ValueError):
    pass


Exponent = float | Fraction | int


def _as_float(p: Exponent) -> float:
    return float(p)


def lp_norm(f: GridFunction, p: Exponent) -> float:
    """L^p norm against dx (normalised) or dm (counting), per ``f.side``."""
    p = _as_float(p)
    if p < 1:
        raise ValueError(f"exponent must be >= 1, got {p}")
    a = np.abs(f.values)
    if math.isinf(p):
        return float(a.max())
    total = float(np.sum(a**p))
    if f.side is Side.SPACE:
        total /= f.size
    return total ** (1.0 / p)


def averaging_ratio(
    f: GridFunction, S: QuadraticSurface, p: Exponent, r: Exponent, path: str = "fourier"
) -> float:
    """||f * dsigma||_{L^r(dx)} / ||f||_{L^p(dx)}."""
    denom = lp_norm(f, p)
    if denom == 0:
        raise ValueError("averaging ratio of the zero function")
    return lp_norm(average(f, S, path), r) / denom


# ---------------------------------------------------------------------------
# level sets
# ---------------------------------------------------------------------------


@dataclass
class LevelDecomposition:
    """f (scaled so that sum |f|^p = 1) floored to sum_k 2^-k 1_{E_k}.

    ``E_k = {x : 2^-k <= scale * f(x) < 2^(-k+1)}``, so the dyadic
    reconstruction sits between half the scaled function and the function
    itself.
    """

    p: float
    sets: list[tuple[int, GridFunction]]
    normalization: float
    scale: float
    dropped_mass: float = 0.0

    def sizes(self) -> dict[int, int]:
        return {k: int(np.count_nonzero(E.values)) for k, E in self.sets}

    def mass(self) -> float:
        """sum_k 2^(-pk) |E_k|."""
        return float(sum(2.0 ** (-self.p * k) * n for k, n in self.sizes().items()))

    def reconstruct(self) -> GridFunction:
        first = self.sets[0][1]
        out = np.zeros(first.size)
        for k, E in self.sets:
            out += 2.0**-k * E.values.real
        return GridFunction(first.field, first.d, out, first.side)

    def disjoint(self) -> bool:
        total = sum(np.count_nonzero(E.values) for _, E in self.sets)
        union = np.zeros(self.sets[0][1].size, dtype=bool)
        for _, E in self.sets:
            union |= E.values != 0
        return int(union.sum()) == total


def level_decompose(f: GridFunction, p: Exponent, normalize: bool = True, k_max: int = 60) -> LevelDecomposition:
    p = _as_float(p)
    vals = f.values
    if np.any(np.abs(vals.imag) > 0) or np.any(vals.real < 0):
        raise ValueError("level decomposition needs a nonnegative real function")
    v = vals.real
    norm = float(np.sum(v**p))
    if norm == 0:
        raise ValueError("level decomposition of the zero function")
    scale = norm ** (-1.0 / p) if normalize else 1.0
    g = v * scale
    pos = np.flatnonzero(g > 0)
    # g in [2^(e-1), 2^e)  =>  level k = 1 - e
    _, e = np.frexp(g[pos])
    k = 1 - e
    keep = k <= k_max
    dropped = float(np.sum(g[pos[~keep]] ** p))
    sets = []
    for level in np.unique(k[keep]):
        members = pos[keep][k[keep] == level]
        sets.append((int(level), GridFunction.indicator(f.field, f.d, members, f.side)))
    return LevelDecomposition(p, sets, norm, scale, dropped)


# ---------------------------------------------------------------------------
# regimes and kernel bounds
# ---------------------------------------------------------------------------


def regime_classify(d: int, q: int, size: int) -> str:
    """J1: |E| <= q^((d-2)/2); J2: up to q^(d/2); J3 beyond."""
    if not 1 <= size <= q**d:
        raise ValueError(f"set size {size} out of range [1, {q ** d}]")
    if size * size <= q ** (d - 2):
        return "J1"
    if size * size <= q**d:
        return "J2"
    return "J3"


def critical_norm_exponent(d: int) -> float:
    """Lebesgue exponent of the critical kernel estimate: 6 for d = 4, (d-1)/2 beyond."""
    if d == 4:
        return 6.0
    if d >= 6 and d % 2 == 0:
        return (d - 1) / 2
    raise UnsupportedDimensionError(f"critical kernel estimate needs even d >= 4, got {d}")


def kernel_rhs(kind: str, d: int, q: int, size: int) -> float:
    """Right-hand side of the kernel estimate selected by the regime of |E|."""
    n = float(size)
    if kind == "linf":
        return q ** (1.0 - d) * n
    regime = regime_classify(d, q, size)
    if kind == "l2":
        return {
            "J1": q ** ((1.0 - 2 * d) / 2) * n**0.5,
            "J2": q ** ((4.0 - 5 * d) / 4) * n,
            "J3": q ** (1.0 - d) * n**0.5,
        }[regime]
    if kind == "lcrit":
        if d == 4:
            return {
                "J1": q ** (-19 / 6) * n ** (5 / 6),
                "J2": q ** (-10 / 3) * n,
                "J3": q**-3.0 * n ** (5 / 6),
            }[regime]
        critical_norm_exponent(d)
        a = (d - 3) / (d - 1)
        return {
            "J1": q ** ((-d * d + 2 * d - 3) / (d - 1)) * n**a,
            "J2": q ** ((-d * d + d - 1) / (d - 1)) * n,
            "J3": q ** (1.0 - d) * n**a,
        }[regime]
    raise ValueError(f"unknown norm kind {kind!r}")


@dataclass
class BoundReport:
    q: int
    d: int
    coeffs: tuple[int, ...]
    experiment: str
    family: str
    size: int | None
    regime: str
    lhs: float
    rhs: float
    constant: float
    passed: bool
    seed: int | None = None

    HEADER = ("q", "d", "coeffs", "experiment", "family", "size", "regime", "lhs", "rhs", "constant", "pass", "seed")

    @classmethod
    def build(cls, *, lhs: float, rhs: float, ceiling: float = math.inf, **kw) -> "BoundReport":
        c = lhs / rhs if rhs else math.inf
        return cls(lhs=lhs, rhs=rhs, constant=c, passed=c <= ceiling, **kw)

    def row(self) -> tuple[str, ...]:
        f = lambda x: format(float(x), ".17g")  # noqa: E731
        return (
            str(self.q),
            str(self.d),
            ";".join(str(c) for c in self.coeffs),
            self.experiment,
            self.family,
            "" if self.size is None else str(self.size),
            self.regime,
            f(self.lhs),
            f(self.rhs),
            f(self.constant),
            "true" if self.passed else "false",
            "" if self.seed is None else str(self.seed),
        )


def reports_to_csv(reports: Iterable[BoundReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(BoundReport.HEADER)
    for rep in reports:
        w.writerow(rep.row())
    return buf.getvalue()


def write_reports(path, reports: Iterable[BoundReport]) -> None:
    write_atomic(path, reports_to_csv(reports))


def _set_size(E: GridFunction) -> int:
    vals = E.values
    if not np.all(np.isin(vals, (0, 1))):
        raise ValueError("expected a {0,1}-valued indicator grid")
    n = int(np.count_nonzero(vals))
    if n == 0:
        raise ValueError("empty set")
    return n


def kernel_norm_bound_check(
    E: GridFunction,
    S: QuadraticSurface,
    norm_kind: str,
    *,
    data: SurfaceData | None = None,
    ceiling: float = math.inf,
    experiment: str = "kernel",
    family: str = "set",
    seed: int | None = None,
) -> BoundReport:
    """Measure ||E * K^|| in the requested norm against its regime-matched bound.

    ``linf`` uses the Young bound ``q^(1-d) |E|``, ``l2`` the three-regime L^2
    bound and ``lcrit`` the L^6 (d = 4) or L^((d-1)/2) (d >= 6) bound.
    """
    if S.d % 2:
        raise UnsupportedDimensionError("kernel bounds need even d")
    size = _set_size(E)
    data = data or surface_data(S)
    conv = convolve_khat(E, data)
    q, d = S.field.q, S.d
    exponent = {"linf": math.inf, "l2": 2.0}.get(norm_kind)
    if exponent is None:
        if norm_kind != "lcrit":
            raise ValueError(f"unknown norm kind {norm_kind!r}")
        exponent = critical_norm_exponent(d)
    lhs = lp_norm(conv, exponent)
    rhs = kernel_rhs(norm_kind, d, q, size)
    return BoundReport.build(
        q=q,
        d=d,
        coeffs=S.coeffs,
        experiment=f"{experiment}-{norm_kind}",
        family=family,
        size=size,
        regime=regime_classify(d, q, size),
        lhs=lhs,
        rhs=rhs,
        ceiling=ceiling,
        seed=seed,
    )


@dataclass
class L2Split:
    I: float
    II: float
    exact: float  # sum_{m != 0} |E^(m)|^2 |K(m)|^2 = ||E * K^||_2^2
    c_ii: float  # II / (q^-2d |E|)
    c_i1: float  # I / (q^-(2d-2) |E|)

    def __iter__(self):
        return iter((self.I, self.II))


def kernel_l2_split(E: GridFunction, S: QuadraticSurface, data: SurfaceData | None = None) -> L2Split:
    if S.d % 2:
        raise UnsupportedDimensionError("L^2 split needs even d")
    size = _set_size(E)
    data = data or surface_data(S)
    q, d = S.field.q, S.d
    power = np.abs(forward_transform(E).values) ** 2
    nonzero = np.ones(power.size, dtype=bool)
    nonzero[0] = False
    on_dual = dual_form_values(S) == 0
    I = q ** (2.0 - d) * float(power[nonzero & on_dual].sum())
    II = q ** (-float(d)) * float(power[nonzero & ~on_dual].sum())
    exact = float(np.sum(power * np.abs(data.kernel.values) ** 2))
    return L2Split(I, II, exact, II / (q ** (-2.0 * d) * size), I / (q ** (2.0 - 2 * d) * size))


# ---------------------------------------------------------------------------
# test functions
# ---------------------------------------------------------------------------


def _subspace(S: QuadraticSurface):
    if S.d % 2 or not hyperbolicity_test(S):
        raise NotHyperbolicError(
            "theorem hypothesis fails: no d/2-dimensional subspace on this surface"
        )
    try:
        return isotropic_subspace(S, "construct")
    except ValueError:
        return isotropic_subspace(S, "search")


def extremizer_family(
    name: str,
    S: QuadraticSurface,
    *,
    size: int | None = None,
    levels: int = 3,
    level: int = 0,
    seed: int = 0,
) -> GridFunction:
    """Test functions for the averaging operator.

    ``delta`` and ``subspace`` are the two extremizers; ``random_set`` draws a
    uniform subset of the given size; ``dyadic_random`` builds
    ``sum_k 2^-k 1_{E_k}`` over ``levels`` random disjoint sets;
    ``sublevel`` is the level set ``{Q(x) = level}`` of the quadratic form.
    """
    F, d = S.field, S.d
    N = F.q**d
    rng = np.random.default_rng(seed)
    if name == "delta":
        return GridFunction.delta(F, d)
    if name == "subspace":
        H = _subspace(S)
        return GridFunction.indicator(F, d, H.flat_points())
    if name == "random_set":
        if size is None or not 1 <= size <= N:
            raise ValueError(f"random_set needs 1 <= size <= {N}")
        return GridFunction.indicator(F, d, rng.choice(N, size=size, replace=False))
    if name == "dyadic_random":
        order = rng.permutation(N)
        cap = max(1, N // (2 * levels))
        sizes = rng.integers(1, cap + 1, size=levels)
        vals = np.zeros(N)
        start = 0
        for k, n in enumerate(sizes):
            vals[order[start : start + n]] = 2.0**-k
            start += n
        return GridFunction(F, d, vals)
    if name == "sublevel":
        target = F.index_of(level)
        return GridFunction.indicator(F, d, np.flatnonzero(S.form(coords(F, d)) == target))
    raise ValueError(f"unknown extremizer family {name!r}")


DEFAULT_FAMILIES = ("delta", "subspace", "random_set", "dyadic_random", "sublevel")


def battery(
    S: QuadraticSurface, seeds: Sequence[int] = (0,), families: Sequence[str] = DEFAULT_FAMILIES
) -> list[tuple[str, int | None, GridFunction]]:
    """(label, seed, function) triples covering every regime of set sizes."""
    q, d = S.field.q, S.d
    out: list[tuple[str, int | None, GridFunction]] = []
    for name in families:
        if name == "delta":
            out.append(("delta", None, extremizer_family("delta", S)))
        elif name == "subspace":
            if d % 2 == 0 and hyperbolicity_test(S):
                out.append(("subspace", None, extremizer_family("subspace", S)))
        elif name == "random_set":
            sizes = sorted({max(1, round(q ** (k / 2))) for k in range(d - 2, 2 * d)} | {q**d // 2})
            for n in sizes:
                for s in seeds:
                    out.append((f"random_set({n})", s, extremizer_family("random_set", S, size=n, seed=s)))
        elif name == "dyadic_random":
            for levels in (3, 6):
                for s in seeds:
                    fam = extremizer_family("dyadic_random", S, levels=levels, seed=s)
                    out.append((f"dyadic_random({levels})", s, fam))
        elif name == "sublevel":
            for level in (0, 1):
                out.append((f"sublevel({level})", None, extremizer_family("sublevel", S, level=level)))
        else:
            raise ValueError(f"unknown extremizer family {name!r}")
    return out


# ---------------------------------------------------------------------------
# sharpness
# ---------------------------------------------------------------------------


def fit_log_slope(qs: Sequence[float], values: Sequence[float]) -> float:
    """Least-squares slope of log(value) against log(q)."""
    slope, _ = np.polyfit(np.log(np.asarray(qs, float)), np.log(np.asarray(values, float)), 1)
    return float(slope)


def _exponent_from_reciprocal(x: Fraction) -> float:
    return math.inf if x == 0 else float(1 / x)


@dataclass
class SharpnessResult:
    point: tuple[Fraction, Fraction]
    reports: list[BoundReport]
    slopes: dict[str, float] = field(default_factory=dict)


def sharpness_probe(
    coeffs: Sequence[int],
    point: tuple,
    q_list: Sequence[int],
    families: Sequence[str] = ("subspace", "delta"),
) -> SharpnessResult:
    """Averaging ratios at an exponent pair outside the hyperbolic region, per q."""
    d = len(coeffs)
    x, y = Fraction(point[0]), Fraction(point[1])
    where = classify_point(region_for(d, hyperbolic=True), (x, y))
    if where != "outside":
        where_text = {"vertex": "a vertex of", "boundary": "on the boundary of", "inside": "inside"}[where]
        raise ProbeMeaninglessError(f"probe meaningless: ({x}, {y}) is {where_text} the region")
    p, r = _exponent_from_reciprocal(x), _exponent_from_reciprocal(y)
    reports, ratios = [], {name: [] for name in families}
    for q in q_list:
        S = make_surface(field_from_order(q), coeffs)
        for name in families:
            f = extremizer_family(name, S)
            num, den = lp_norm(average(f, S), r), lp_norm(f, p)
            size = int(np.count_nonzero(f.values))
            reports.append(
                BoundReport.build(
                    q=q,
                    d=d,
                    coeffs=S.coeffs,
                    experiment="sharpness",
                    family=name,
                    size=size,
                    regime=regime_classify(d, q, size),
                    lhs=num,
                    rhs=den,
                )
            )
            ratios[name].append(num / den)
    slopes = {name: fit_log_slope(q_list, vals) for name, vals in ratios.items()}
    return SharpnessResult((x, y), reports, slopes)
