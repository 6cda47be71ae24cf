"""Diagonal quadrics a_1 x_1^2 + ... + a_d x_d^2 = 0 and the exponent regions."""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .ffield import FieldElement, FieldSpec, gauss_sum
from .grid import GridFunction, check_budget, coords, negation_index

__all__ = [
    "DegenerateFormError",
    "UnsupportedDimensionError",
    "NoConstructivePatternError",
    "QuadraticSurface",
    "IsotropicSubspace",
    "ExponentRegion",
    "make_surface",
    "enumerate_surface",
    "count_points_closed_form",
    "dual_surface",
    "hyperbolicity_test",
    "isotropic_subspace",
    "iter_subspaces",
    "region_for",
    "region_contains",
    "classify_point",
    "critical_point",
]


class DegenerateFormError(ValueError):
    pass


class UnsupportedDimensionError(ValueError):
    pass


class NoConstructivePatternError(ValueError):
    pass


@dataclass(frozen=True)
class QuadraticSurface:
    field: FieldSpec
    d: int
    coeffs: tuple[int, ...]  # element indices, all nonzero

    def __repr__(self) -> str:
        return f"QuadraticSurface(q={self.field.q}, d={self.d}, coeffs={self.coeffs})"

    def form(self, pts: np.ndarray) -> np.ndarray:
        """Element index of sum_j a_j x_j^2 for each row of ``pts``."""
        F = self.field
        pts = np.asarray(pts, dtype=np.int64)
        acc = F.mul[self.coeffs[0], F.mul[pts[..., 0], pts[..., 0]]]
        for j in range(1, self.d):
            acc = F.add[acc, F.mul[self.coeffs[j], F.mul[pts[..., j], pts[..., j]]]]
        return acc

    def contains(self, point: Sequence[int]) -> bool:
        pt = np.array([self.field.index_of(c) for c in point], dtype=np.int64)
        return bool(self.form(pt) == 0)

    @property
    def discriminant(self) -> int:
        F = self.field
        return functools.reduce(lambda a, b: int(F.mul[a, b]), self.coeffs, 1)


def make_surface(F: FieldSpec, coeffs: Sequence, budget: int | None = None) -> QuadraticSurface:
    """Validate a diagonal form over ``F``.

    ``coeffs`` may mix :class:`FieldElement`, coordinate tuples and signed
    integers; an integer ``c`` means ``c mod p`` (so ``-1`` is ``p - 1``).
    """
    idx = tuple(F.index_of(c) for c in coeffs)
    if len(idx) < 2:
        raise UnsupportedDimensionError(f"dimension must be >= 2, got {len(idx)}")
    if any(a == 0 for a in idx):
        raise DegenerateFormError(f"degenerate form: zero coefficient in {tuple(coeffs)}")
    check_budget(F.q, len(idx), budget)
    return QuadraticSurface(F, len(idx), idx)


@functools.lru_cache(maxsize=64)
def _surface_points(S: QuadraticSurface) -> np.ndarray:
    flat = np.flatnonzero(S.form(coords(S.field, S.d)) == 0)
    flat.setflags(write=False)
    return flat


def surface_points(S: QuadraticSurface) -> np.ndarray:
    """Flat grid indices of the points of S."""
    return _surface_points(S)


def enumerate_surface(S: QuadraticSurface) -> tuple[GridFunction, int]:
    pts = surface_points(S)
    ind = GridFunction.indicator(S.field, S.d, pts)
    return ind, int(pts.size)


def count_points_closed_form(S: QuadraticSurface) -> int:
    """|S| = q^(d-1) + G_1^d (1 - 1/q) eta(a_1 ... a_d), valid for even d."""
    if S.d % 2:
        raise UnsupportedDimensionError("closed-form point count is only available for even d")
    F = S.field
    q, d = F.q, S.d
    g1 = gauss_sum(FieldElement(F, 1))
    value = q ** (d - 1) + g1**d * (1 - 1 / q) * int(F.eta[S.discriminant])
    rounded = round(value.real)
    if abs(value - rounded) > 1e-6 * max(1.0, abs(value)):
        raise ArithmeticError(f"closed-form count {value} is not an integer")
    return int(rounded)


def dual_surface(S: QuadraticSurface) -> QuadraticSurface:
    F = S.field
    return QuadraticSurface(F, S.d, tuple(int(F.inv[a]) for a in S.coeffs))


def hyperbolicity_test(S: QuadraticSurface) -> bool:
    """eta((-1)^(d/2) a_1 ... a_d) == +1."""
    if S.d % 2:
        raise UnsupportedDimensionError("hyperbolicity is defined for even d only")
    F = S.field
    sign = F.neg[1] if (S.d // 2) % 2 else 1
    return int(F.eta[F.mul[sign, S.discriminant]]) == 1


# ---------------------------------------------------------------------------
# isotropic subspaces
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IsotropicSubspace:
    field: FieldSpec
    basis: tuple[tuple[int, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.basis)

    def points(self) -> np.ndarray:
        """All q^dim points as an array of coordinate rows."""
        F = self.field
        B = np.array(self.basis, dtype=np.int64)
        combos = np.array(list(itertools.product(range(F.q), repeat=self.dim)), dtype=np.int64)
        return _span(F, combos, B[None])[0]

    def flat_points(self) -> np.ndarray:
        from .grid import flat_index

        return np.unique(flat_index(self.field, self.points()))

    def is_isotropic_for(self, S: QuadraticSurface) -> bool:
        return bool(np.all(S.form(self.points()) == 0))

    def is_independent(self) -> bool:
        return _rank(self.field, [list(b) for b in self.basis]) == self.dim


def _span(F: FieldSpec, combos: np.ndarray, bases: np.ndarray) -> np.ndarray:
    """Points sum_i c_i b_i for every combo and every basis in the batch.

    combos: (M, k); bases: (N, k, d) -> (N, M, d)
    """
    acc = F.mul[combos[None, :, 0, None], bases[:, None, 0, :]]
    for i in range(1, combos.shape[1]):
        acc = F.add[acc, F.mul[combos[None, :, i, None], bases[:, None, i, :]]]
    return acc


def _rank(F: FieldSpec, rows: list[list[int]]) -> int:
    rows = [r[:] for r in rows]
    rank, ncols = 0, len(rows[0]) if rows else 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][col]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = int(F.inv[rows[rank][col]])
        rows[rank] = [int(F.mul[inv, v]) for v in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][col]:
                c = rows[i][col]
                rows[i] = [int(F.sub[a, F.mul[c, b]]) for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def iter_subspaces(F: FieldSpec, d: int, k: int) -> Iterator[np.ndarray]:
    """Yield each k-dimensional subspace of F_q^d once, as its reduced echelon basis.

    Pivot columns are chosen in lexicographic order; free entries sit to the
    right of each row's pivot in non-pivot columns.
    """
    for pivots in itertools.combinations(range(d), k):
        free = [(i, c) for i, pc in enumerate(pivots) for c in range(pc + 1, d) if c not in pivots]
        for vals in itertools.product(range(F.q), repeat=len(free)):
            B = np.zeros((k, d), dtype=np.int64)
            for i, pc in enumerate(pivots):
                B[i, pc] = 1
            for (i, c), v in zip(free, vals):
                B[i, c] = v
            yield B


def _pair_basis(S: QuadraticSurface) -> tuple[tuple[int, ...], ...]:
    F = S.field
    a = S.coeffs
    unmatched = list(range(S.d))
    basis = []
    while unmatched:
        i = unmatched.pop(0)
        # partner j with -a_j / a_i = c^2, giving a_i c^2 + a_j = 0
        for j in unmatched:
            ratio = int(F.mul[F.neg[a[j]], F.inv[a[i]]])
            if F.eta[ratio] == 1:
                c = int(np.flatnonzero(F.mul[np.arange(F.q), np.arange(F.q)] == ratio)[0])
                unmatched.remove(j)
                v = [0] * S.d
                v[i], v[j] = c, 1
                basis.append(tuple(v))
                break
        else:
            raise NoConstructivePatternError(
                f"no constructive pattern for coefficients {a}; use search mode"
            )
    return tuple(basis)


def isotropic_subspace(
    S: QuadraticSurface, mode: str = "construct", batch: int = 4096
) -> IsotropicSubspace | None:
    """A d/2-dimensional subspace contained in S, or ``None`` if search finds none.

    ``construct`` pairs coordinates whose coefficients satisfy
    ``-a_j / a_i = c^2`` and returns the basis ``c e_i + e_j``; for the
    alternating form this is ``{(t1, t1, t2, t2, ...)}``.  ``search`` walks
    every d/2-dimensional subspace in echelon order and returns the first one
    whose q^(d/2) points all lie on S.
    """
    if S.d % 2:
        raise UnsupportedDimensionError("isotropic subspaces of dimension d/2 need even d")
    F, k = S.field, S.d // 2
    if mode == "construct":
        H = IsotropicSubspace(F, _pair_basis(S))
        assert H.is_isotropic_for(S)
        return H
    if mode != "search":
        raise ValueError(f"unknown mode {mode!r}")
    combos = np.array(list(itertools.product(range(F.q), repeat=k)), dtype=np.int64)
    gen = iter_subspaces(F, S.d, k)
    while True:
        chunk = list(itertools.islice(gen, batch))
        if not chunk:
            return None
        bases = np.stack(chunk)
        on_surface = np.all(S.form(_span(F, combos, bases)) == 0, axis=1)
        hits = np.flatnonzero(on_surface)
        if hits.size:
            B = bases[hits[0]]
            return IsotropicSubspace(F, tuple(tuple(int(v) for v in row) for row in B))


def count_isotropic_subspaces(S: QuadraticSurface, batch: int = 4096) -> tuple[int, int]:
    """(number of isotropic d/2-subspaces, number of d/2-subspaces examined)."""
    F, k = S.field, S.d // 2
    combos = np.array(list(itertools.product(range(F.q), repeat=k)), dtype=np.int64)
    gen = iter_subspaces(F, S.d, k)
    hits = total = 0
    while chunk := list(itertools.islice(gen, batch)):
        bases = np.stack(chunk)
        hits += int(np.all(S.form(_span(F, combos, bases)) == 0, axis=1).sum())
        total += len(chunk)
    return hits, total


def is_symmetric(S: QuadraticSurface) -> bool:
    """S == -S, checked on the indicator."""
    pts = surface_points(S)
    mask = np.zeros(S.field.q**S.d, dtype=bool)
    mask[pts] = True
    return bool(np.array_equal(mask, mask[negation_index(S.field, S.d)]))


# ---------------------------------------------------------------------------
# exponent regions
# ---------------------------------------------------------------------------

Point = tuple[Fraction, Fraction]


def _as_point(pt) -> Point:
    x, y = pt
    return Fraction(x), Fraction(y)


def _cross(o: Point, a: Point, b: Point) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _hull(points: Sequence[Point]) -> list[Point]:
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts
    lower: list[Point] = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[Point] = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


@dataclass(frozen=True)
class ExponentRegion:
    """Closed convex hull of points (1/p, 1/r), stored exactly."""

    vertices: tuple[Point, ...]
    halfplanes: tuple[tuple[Fraction, Fraction, Fraction], ...] = field(init=False)

    def __post_init__(self) -> None:
        verts = tuple(_as_point(v) for v in self.vertices)
        object.__setattr__(self, "vertices", verts)
        hull = _hull(verts)
        planes = []
        # counter-clockwise hull: inside means a*x + b*y + c >= 0 for each edge
        for A, B in zip(hull, hull[1:] + hull[:1]):
            a = -(B[1] - A[1])
            b = B[0] - A[0]
            c = -(a * A[0] + b * A[1])
            planes.append((a, b, c))
        object.__setattr__(self, "halfplanes", tuple(planes))

    def slack(self, pt) -> list[Fraction]:
        x, y = _as_point(pt)
        return [a * x + b * y + c for a, b, c in self.halfplanes]


def critical_point(d: int) -> Point:
    """(1/p, 1/r) = ((d^2 - 2d + 2) / (d(d-1)), 1/(d-1))."""
    return Fraction(d * d - 2 * d + 2, d * (d - 1)), Fraction(1, d - 1)


def region_for(d: int, hyperbolic: bool) -> ExponentRegion:
    if d < 2:
        raise UnsupportedDimensionError(f"dimension must be >= 2, got {d}")
    base = [(Fraction(0), Fraction(0)), (Fraction(0), Fraction(1)), (Fraction(1), Fraction(1))]
    if hyperbolic:
        extra = [critical_point(d), (Fraction(d - 2, d - 1), Fraction(d - 2, d * (d - 1)))]
    else:
        extra = [(Fraction(d, d + 1), Fraction(1, d + 1))]
    return ExponentRegion(tuple(base + extra))


def region_contains(R: ExponentRegion, point) -> bool:
    return all(s >= 0 for s in R.slack(point))


def classify_point(R: ExponentRegion, point) -> str:
    """One of ``vertex``, ``boundary``, ``inside``, ``outside``."""
    pt = _as_point(point)
    if pt in R.vertices:
        return "vertex"
    slack = R.slack(pt)
    if any(s < 0 for s in slack):
        return "outside"
    return "boundary" if any(s == 0 for s in slack) else "inside"
