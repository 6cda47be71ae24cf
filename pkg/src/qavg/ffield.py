"""Finite fields F_q of odd characteristic.

Elements are stored as integer indices ``0 <= i < q``.  For a prime field the
index is the residue itself; for ``q = p**n`` the index packs the
polynomial-basis coordinates little-endian, ``i = c_0 + c_1 p + ... +
c_{n-1} p**(n-1)``, so the enumeration order is lexicographic in the
coordinates with ``c_0`` varying fastest.

All arithmetic is done through precomputed ``q x q`` tables, which keeps the
grid code in :mod:`qavg.spectral` fully vectorised.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

__all__ = [
    "FieldError",
    "NotPrimeError",
    "EvenCharacteristicError",
    "ReducibleModulusError",
    "UnsupportedFieldError",
    "GridBudgetError",
    "FieldSpec",
    "FieldElement",
    "make_field",
    "field_arith",
    "trace_map",
    "additive_character",
    "quadratic_character",
    "gauss_sum",
    "MAX_FIELD_SIZE",
]

# q x q tables are built eagerly; keep them small.
MAX_FIELD_SIZE = 2048

# Monic moduli, little-endian coefficients (constant term first).
BUILTIN_MODULI: dict[int, tuple[int, ...]] = {
    9: (1, 0, 1),  # t^2 + 1
    25: (2, 0, 1),  # t^2 + 2
    27: (1, 2, 0, 1),  # t^3 + 2t + 1
    49: (1, 0, 1),  # t^2 + 1
    81: (2, 0, 0, 1, 1),  # t^4 + t^3 + 2
}


class FieldError(ValueError):
    """Base class for invalid field construction."""


class NotPrimeError(FieldError):
    pass


class EvenCharacteristicError(FieldError):
    pass


class ReducibleModulusError(FieldError):
    pass


class UnsupportedFieldError(FieldError):
    pass


class GridBudgetError(FieldError):
    """Raised when ``q**d`` exceeds the configured grid budget."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    return all(n % k for k in range(3, math.isqrt(n) + 1, 2))


# ---------------------------------------------------------------------------
# polynomial helpers over Z/p (little-endian coefficient lists)
# ---------------------------------------------------------------------------


def _poly_trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a: Sequence[int], m: Sequence[int], p: int) -> list[int]:
    a = _poly_trim([c % p for c in a])
    m = _poly_trim([c % p for c in m])
    inv_lead = pow(m[-1], -1, p)
    while len(a) >= len(m):
        coef = a[-1] * inv_lead % p
        shift = len(a) - len(m)
        for i, c in enumerate(m):
            a[shift + i] = (a[shift + i] - coef * c) % p
        _poly_trim(a)
    return a


def _poly_mul(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return out


def _monic_polys(degree: int, p: int) -> Iterator[list[int]]:
    for k in range(p**degree):
        coeffs = [(k // p**i) % p for i in range(degree)]
        yield coeffs + [1]


def is_irreducible(modulus: Sequence[int], p: int) -> bool:
    """Exhaustive trial division by every monic polynomial of degree <= n/2."""
    n = len(modulus) - 1
    if n < 1 or modulus[-1] % p != 1:
        return False
    for deg in range(1, n // 2 + 1):
        for g in _monic_polys(deg, p):
            if not _poly_mod(modulus, g, p):
                return False
    return True


def _find_modulus(p: int, n: int) -> tuple[int, ...]:
    for g in _monic_polys(n, p):
        if is_irreducible(g, p):
            return tuple(g)
    raise UnsupportedFieldError(f"no irreducible polynomial of degree {n} over F_{p}")


# ---------------------------------------------------------------------------
# field spec
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FieldSpec:
    """A finite field F_q with q = p**n, p odd.

    Instances are interned by :func:`make_field`, so identity comparison is
    equality.  The lookup tables are read-only numpy arrays indexed by element
    index.
    """

    p: int
    n: int
    modulus: tuple[int, ...]
    q: int = field(init=False)
    generator: int = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "q", self.p**self.n)
        q, p, n = self.q, self.p, self.n

        digits = np.array([[(i // p**j) % p for j in range(n)] for i in range(q)], dtype=np.int64)
        weights = p ** np.arange(n, dtype=np.int64)
        add = ((digits[:, None, :] + digits[None, :, :]) % p) @ weights
        neg = ((-digits) % p) @ weights

        mul = np.zeros((q, q), dtype=np.int64)
        for a in range(1, q):
            pa = list(digits[a])
            for b in range(a, q):
                r = _poly_mod(_poly_mul(pa, list(digits[b]), p), self.modulus, p) if n > 1 else [
                    (a * b) % p
                ]
                idx = sum(c * p**j for j, c in enumerate(r))
                mul[a, b] = mul[b, a] = idx

        inv = np.full(q, -1, dtype=np.int64)
        rows, cols = np.nonzero(mul == 1)
        inv[rows] = cols

        # Frobenius powers x^(p^i); index of x^p computed through the table.
        frob = np.arange(q)
        acc = np.arange(q)
        for _ in range(1, n):
            xp = np.ones(q, dtype=np.int64)
            for _ in range(p):
                xp = mul[xp, frob]
            frob = xp
            acc = add[acc, frob]
        # trace lands in the prime subfield, whose indices are 0..p-1
        if np.any(acc >= p):
            raise ReducibleModulusError("trace left the prime subfield; modulus is not irreducible")
        trace = acc

        squares = np.unique(mul[np.arange(q), np.arange(q)])
        eta = -np.ones(q, dtype=np.int64)
        eta[squares] = 1
        eta[0] = 0

        chi = np.exp(2j * np.pi * trace / p)

        tables = dict(add=add, neg=neg, mul=mul, inv=inv, trace=trace, eta=eta, chi=chi, digits=digits)
        for name, arr in tables.items():
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        sub = add[:, neg]
        sub.setflags(write=False)
        object.__setattr__(self, "sub", sub)

        object.__setattr__(self, "generator", self._smallest_generator())

    def _smallest_generator(self) -> int:
        q = self.q
        for g in range(2, q):
            order, x = 1, g
            while x != 1:
                x = self.mul[x, g]
                order += 1
            if order == q - 1:
                return g
        raise ReducibleModulusError("multiplicative group is not cyclic; modulus is reducible")

    # -- conveniences -----------------------------------------------------

    def __repr__(self) -> str:
        if self.n == 1:
            return f"FieldSpec(F_{self.q})"
        return f"FieldSpec(F_{self.q}, modulus={self.modulus})"

    def __call__(self, value: int | Sequence[int]) -> "FieldElement":
        return FieldElement(self, self.index_of(value))

    def index_of(self, value: int | Sequence[int] | "FieldElement") -> int:
        """Element index of ``value``.

        Plain integers are read as elements of the prime subfield (reduced
        mod p, so ``-1`` is ``p - 1``); sequences are polynomial coordinates.
        """
        if isinstance(value, FieldElement):
            if value.field is not self:
                raise FieldError("element belongs to a different field")
            return value.index
        if isinstance(value, (int, np.integer)):
            return int(value) % self.p
        coeffs = list(value)
        if len(coeffs) > self.n:
            raise FieldError(f"expected at most {self.n} coordinates, got {len(coeffs)}")
        return sum((int(c) % self.p) * self.p**j for j, c in enumerate(coeffs))

    def elements(self) -> list["FieldElement"]:
        return [FieldElement(self, i) for i in range(self.q)]

    def pow_index(self, a: int, e: int) -> int:
        if e < 0:
            if a == 0:
                raise ZeroDivisionError("zero has no inverse in F_q")
            a, e = int(self.inv[a]), -e
        result, base = 1, a
        while e:
            if e & 1:
                result = int(self.mul[result, base])
            base = int(self.mul[base, base])
            e >>= 1
        return result

    def trace_form(self) -> np.ndarray:
        """Gram matrix ``T[j, k] = Tr(t^(j+k))`` of the trace pairing on coordinates."""
        p, n = self.p, self.n
        basis = [p**j for j in range(n)]
        T = np.empty((n, n), dtype=np.int64)
        for j in range(n):
            for k in range(n):
                T[j, k] = self.trace[self.mul[basis[j], basis[k]]]
        return T


@functools.lru_cache(maxsize=None)
def _build(p: int, n: int, modulus: tuple[int, ...]) -> FieldSpec:
    return FieldSpec(p, n, modulus)


def make_field(p: int, n: int = 1, modulus: Sequence[int] | None = None) -> FieldSpec:
    """Build (or fetch the cached) field F_{p^n}.

    Parameters
    ----------
    p : int
        Odd prime characteristic.
    n : int
        Extension degree.
    modulus : sequence of int, optional
        Monic irreducible polynomial of degree ``n``, little-endian
        coefficients.  When omitted a built-in modulus is used for
        q in {9, 25, 27, 49, 81}; other prime powers fall back to the
        lexicographically smallest monic irreducible.

    Raises
    ------
    NotPrimeError, EvenCharacteristicError, ReducibleModulusError,
    UnsupportedFieldError
    """
    if p == 2:
        raise EvenCharacteristicError("even characteristic is not supported (p = 2)")
    if not is_prime(p):
        raise NotPrimeError(f"characteristic {p} is not prime")
    if n < 1:
        raise UnsupportedFieldError(f"extension degree must be >= 1, got {n}")
    q = p**n
    if q > MAX_FIELD_SIZE:
        raise UnsupportedFieldError(f"q = {q} exceeds the supported field size {MAX_FIELD_SIZE}")
    if n == 1:
        mod: tuple[int, ...] = (0, 1)
    elif modulus is None:
        mod = BUILTIN_MODULI.get(q) or _find_modulus(p, n)
    else:
        mod = tuple(int(c) % p for c in modulus)
        if len(mod) != n + 1:
            raise ReducibleModulusError(f"modulus must have degree {n}")
    if n > 1 and not is_irreducible(mod, p):
        raise ReducibleModulusError(f"modulus {mod} is reducible over F_{p}")
    return _build(p, n, mod)


def field_from_order(q: int, modulus: Sequence[int] | None = None) -> FieldSpec:
    """Build F_q from the field size alone."""
    if q < 2:
        raise NotPrimeError(f"{q} is not a prime power")
    if q % 2 == 0:
        raise EvenCharacteristicError(f"even characteristic is not supported (q = {q})")
    p = next(k for k in range(3, q + 1, 2) if q % k == 0)
    n, rest = 0, q
    while rest % p == 0:
        rest //= p
        n += 1
    if rest != 1:
        raise NotPrimeError(f"{q} is not a prime power")
    return make_field(p, n, modulus)


# ---------------------------------------------------------------------------
# elements
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FieldElement:
    field: FieldSpec
    index: int

    def __post_init__(self) -> None:
        if not 0 <= self.index < self.field.q:
            raise FieldError(f"index {self.index} out of range for {self.field!r}")

    @property
    def coeffs(self) -> tuple[int, ...]:
        return tuple(int(c) for c in self.field.digits[self.index])

    def _other(self, other) -> int:
        return self.field.index_of(other)

    def __add__(self, other):
        return FieldElement(self.field, int(self.field.add[self.index, self._other(other)]))

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElement(self.field, int(self.field.sub[self.index, self._other(other)]))

    def __rsub__(self, other):
        return FieldElement(self.field, int(self.field.sub[self._other(other), self.index]))

    def __mul__(self, other):
        return FieldElement(self.field, int(self.field.mul[self.index, self._other(other)]))

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(self.field, int(self.field.neg[self.index]))

    def inverse(self) -> "FieldElement":
        if self.index == 0:
            raise ZeroDivisionError("zero has no inverse in F_q")
        return FieldElement(self.field, int(self.field.inv[self.index]))

    def __truediv__(self, other):
        return self * FieldElement(self.field, self._other(other)).inverse()

    def __pow__(self, e: int):
        return FieldElement(self.field, self.field.pow_index(self.index, e))

    def __bool__(self) -> bool:
        return self.index != 0

    def __int__(self) -> int:
        return self.index

    def __repr__(self) -> str:
        if self.field.n == 1:
            return f"{self.index} (mod {self.field.p})"
        return f"{self.coeffs} in F_{self.field.q}"


def field_arith(a: FieldElement, b: FieldElement | None, op: str) -> FieldElement:
    """Dispatch one of ``add, sub, mul, inv, neg, pow`` (``pow`` takes an int ``b``)."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "inv":
        return a.inverse()
    if op == "neg":
        return -a
    if op == "pow":
        return a ** int(b)
    raise ValueError(f"unknown field operation {op!r}")


def trace_map(x: FieldElement) -> int:
    """Absolute trace Tr(x) = x + x^p + ... + x^(p^(n-1)), as a residue mod p."""
    return int(x.field.trace[x.index])


def additive_character(x: FieldElement) -> complex:
    """Canonical additive character exp(2 pi i Tr(x) / p)."""
    return complex(x.field.chi[x.index])


def quadratic_character(x: FieldElement) -> int:
    return int(x.field.eta[x.index])


def gauss_sum(t: FieldElement) -> complex:
    """G_t = sum over s != 0 of eta(s) chi(t s)."""
    F = t.field
    s = np.arange(1, F.q)
    return complex(np.sum(F.eta[s] * F.chi[F.mul[t.index, s]]))
