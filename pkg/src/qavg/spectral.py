"""Fourier analysis on F_q^d and the surface-measure objects built on it.

Conventions
-----------
``forward_transform`` takes a function on (F_q^d, dx) to (F_q^d, dm)::

    f^(m) = q^-d sum_x f(x) chi(-x.m)

``inverse_transform`` is its exact inverse, ``g(x) = sum_m g(m) chi(m.x)``.
For even ``g`` (every kernel built from a quadric) this coincides with the
``chi(-m.x)`` transform used for ``delta_0`` and ``K``.

Convolution on the dx side is ``f * g(x) = q^-d sum_y f(x - y) g(y)`` and
satisfies ``(f * g)^ = f^ g^``.  The surface measure, as a density against
dx, is ``q^d / |S| * 1_S``, so ``f * dsigma(x) = |S|^-1 sum_{y in S} f(x - y)``.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .ffield import FieldElement, FieldSpec, gauss_sum
from .grid import GridFunction, Side, coords, dot, flat_index, translate_index
from .quadric import (
    QuadraticSurface,
    UnsupportedDimensionError,
    count_points_closed_form,
    dual_surface,
    enumerate_surface,
    is_symmetric,
    surface_points,
)

__all__ = [
    "forward_transform",
    "inverse_transform",
    "character_matrix",
    "SurfaceData",
    "surface_data",
    "dual_form_values",
    "sigma_inverse_ft_direct",
    "sigma_inverse_ft_closed",
    "bochner_riesz_kernel",
    "convolve",
    "average",
    "convolve_khat",
    "mean",
]

# naive O(q^2d) oracles refuse anything larger than this many grid points
NAIVE_LIMIT = 4096


# ---------------------------------------------------------------------------
# transforms
# ---------------------------------------------------------------------------


@functools.lru_cache(maxsize=16)
def _trace_perm(F: FieldSpec) -> np.ndarray:
    """Index of the coordinate vector T c(m) mod p, T the trace-form Gram matrix."""
    T = F.trace_form()
    perm = ((F.digits @ T) % F.p) @ (F.p ** np.arange(F.n))
    perm.setflags(write=False)
    return perm


def _tensor_dft(values: np.ndarray, F: FieldSpec, d: int, inverse: bool) -> np.ndarray:
    """sum_c v(c) exp(-+2 pi i Tr(c.k)/p), one length-p FFT per base-p digit.

    With the trace pairing Tr(x m) = c(x)^T T c(m), the transform over each
    (Z/p)^n axis is an ordinary n-dimensional DFT read at T c(m).
    """
    p, n, q = F.p, F.n, F.q
    arr = values.reshape((p,) * (n * d), order="F")
    out = np.fft.ifftn(arr) * float(q**d) if inverse else np.fft.fftn(arr)
    out = out.reshape(-1, order="F")
    if n == 1:
        return out
    t = out.reshape((q,) * d, order="F")
    perm = _trace_perm(F)
    for axis in range(d):
        t = np.take(t, perm, axis=axis)
    return t.reshape(-1, order="F")


@functools.lru_cache(maxsize=4)
def character_matrix(F: FieldSpec, d: int, sign: int) -> np.ndarray:
    """Dense matrix ``W[m, x] = chi(sign * m.x)``, built from literal dot products."""
    N = F.q**d
    if N > NAIVE_LIMIT:
        raise ValueError(f"naive transform refused for q^d = {N} > {NAIVE_LIMIT}")
    X = coords(F, d)
    W = np.empty((N, N), dtype=np.complex128)
    step = max(1, 2**20 // N)
    for start in range(0, N, step):
        M = X[start : start + step]
        ip = dot(F, M[:, None, :], X[None, :, :])
        if sign < 0:
            ip = F.neg[ip]
        W[start : start + step] = F.chi[ip]
    W.setflags(write=False)
    return W


def forward_transform(f: GridFunction, method: str = "fast") -> GridFunction:
    if f.side is not Side.SPACE:
        raise ValueError("forward_transform expects a dx-side grid")
    F, d = f.field, f.d
    if method == "fast":
        vals = _tensor_dft(f.values, F, d, inverse=False)
    elif method == "naive":
        vals = character_matrix(F, d, -1) @ f.values
    else:
        raise ValueError(f"unknown method {method!r}")
    return GridFunction(F, d, vals / F.q**d, Side.FREQ)


def inverse_transform(g: GridFunction, method: str = "fast") -> GridFunction:
    if g.side is not Side.FREQ:
        raise ValueError("inverse_transform expects a dm-side grid")
    F, d = g.field, g.d
    if method == "fast":
        vals = _tensor_dft(g.values, F, d, inverse=True)
    elif method == "naive":
        vals = character_matrix(F, d, +1) @ g.values
    else:
        raise ValueError(f"unknown method {method!r}")
    return GridFunction(F, d, vals, Side.SPACE)


def mean(f: GridFunction) -> complex:
    return complex(f.values.mean())


# ---------------------------------------------------------------------------
# surface measure
# ---------------------------------------------------------------------------


def dual_form_values(S: QuadraticSurface) -> np.ndarray:
    """Element index of m_1^2/a_1 + ... + m_d^2/a_d at every grid point."""
    return dual_surface(S).form(coords(S.field, S.d))


def sigma_inverse_ft_direct(S: QuadraticSurface, method: str = "fast") -> GridFunction:
    """(dsigma)^v(m) = |S|^-1 sum_{x in S} chi(m.x).

    ``fast`` evaluates the sum with the tensor DFT of the indicator;
    ``naive`` sums the characters over the enumerated points directly.
    """
    F, d = S.field, S.d
    pts = surface_points(S)
    if method == "fast":
        ind = np.zeros(F.q**d, dtype=np.complex128)
        ind[pts] = 1.0
        vals = _tensor_dft(ind, F, d, inverse=True)
    elif method == "naive":
        X = coords(F, d)
        Y = X[pts]
        vals = np.empty(F.q**d, dtype=np.complex128)
        step = max(1, 2**20 // max(1, len(pts)))
        for start in range(0, len(X), step):
            ip = dot(F, X[start : start + step, None, :], Y[None, :, :])
            vals[start : start + step] = F.chi[ip].sum(axis=1)
    else:
        raise ValueError(f"unknown method {method!r}")
    return GridFunction(F, d, vals / len(pts), Side.FREQ)


def sigma_inverse_ft_closed(S: QuadraticSurface) -> GridFunction:
    """Three-case Gauss-sum formula for (dsigma)^v, even d only."""
    if S.d % 2:
        raise UnsupportedDimensionError("closed form for (dsigma)^v needs even d")
    F, d, q = S.field, S.d, S.field.q
    size = count_points_closed_form(S)
    g1d = gauss_sum(FieldElement(F, 1)) ** d
    eta = int(F.eta[S.discriminant])
    on_dual = g1d / size * (1 - 1 / q) * eta
    off_dual = -g1d / (q * size) * eta
    vals = np.where(dual_form_values(S) == 0, on_dual, off_dual).astype(np.complex128)
    vals[0] = q ** (d - 1) / size + on_dual
    return GridFunction(F, d, vals, Side.FREQ)


@dataclass(frozen=True, eq=False)
class SurfaceData:
    surface: QuadraticSurface
    indicator: GridFunction
    count: int
    sigma_check: GridFunction
    kernel: GridFunction
    kernel_hat: GridFunction

    @property
    def density(self) -> GridFunction:
        """dsigma as a density against dx: q^d/|S| on S."""
        return self.indicator * (self.surface.field.q**self.surface.d / self.count)


def bochner_riesz_kernel(
    S: QuadraticSurface, sigma_check: GridFunction | None = None
) -> tuple[GridFunction, GridFunction]:
    """K = (dsigma)^v - delta_0 and its transform K^ (so dsigma = K^ + 1)."""
    if sigma_check is None:
        sigma_check = sigma_inverse_ft_direct(S)
    vals = sigma_check.values.copy()
    vals[0] = 0.0
    K = GridFunction(S.field, S.d, vals, Side.FREQ)
    return K, inverse_transform(K)


@functools.lru_cache(maxsize=16)
def surface_data(S: QuadraticSurface) -> SurfaceData:
    ind, count = enumerate_surface(S)
    sig = sigma_inverse_ft_direct(S)
    K, Khat = bochner_riesz_kernel(S, sig)
    return SurfaceData(S, ind, count, sig, K, Khat)


# ---------------------------------------------------------------------------
# convolutions
# ---------------------------------------------------------------------------


def convolve(f: GridFunction, g: GridFunction, path: str = "fourier") -> GridFunction:
    """dx-normalised convolution q^-d sum_y f(x - y) g(y)."""
    if f.side is not Side.SPACE or g.side is not Side.SPACE:
        raise ValueError("convolution is defined for dx-side grids")
    F, d = f.field, f.d
    if path == "fourier":
        return inverse_transform(forward_transform(f) * forward_transform(g))
    if path != "naive":
        raise ValueError(f"unknown path {path!r}")
    X = coords(F, d)
    out = np.zeros(F.q**d, dtype=np.complex128)
    for y in np.flatnonzero(g.values):
        out += g.values[y] * f.values[translate_index(F, d, X[y])]
    return GridFunction(F, d, out / F.q**d, Side.SPACE)


def average(f: GridFunction, S: QuadraticSurface, path: str = "fourier") -> GridFunction:
    """A f(x) = |S|^-1 sum_{y in S} f(x - y)."""
    if f.side is not Side.SPACE:
        raise ValueError("average expects a dx-side grid")
    F, d = S.field, S.d
    if path == "naive":
        X = coords(F, d)
        pts = surface_points(S)
        out = np.zeros(F.q**d, dtype=np.complex128)
        for y in pts:
            out += f.values[translate_index(F, d, X[y])]
        return GridFunction(F, d, out / len(pts), Side.SPACE)
    if path != "fourier":
        raise ValueError(f"unknown path {path!r}")
    # (f * dsigma)^(m) = f^(m) (dsigma)^v(-m); the reflection is a no-op when S = -S
    if not is_symmetric(S):
        raise AssertionError("surface is not symmetric under x -> -x")
    data = surface_data(S)
    return inverse_transform(forward_transform(f) * data.sigma_check)


def convolve_khat(f: GridFunction, data: SurfaceData, path: str = "fourier") -> GridFunction:
    """f * K^ on the dx side; equals A f - mean(f)."""
    if path == "fourier":
        return inverse_transform(forward_transform(f) * data.kernel)
    return convolve(f, data.kernel_hat, path="naive")
