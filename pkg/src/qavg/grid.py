"""Dense complex functions on F_q^d.

A point ``x = (x_0, ..., x_{d-1})`` lives at flat index ``sum(idx(x_i) * q**i)``
(little-endian in the coordinates).  ``values.reshape((q,) * d, order="F")``
is therefore the tensor view with ``tensor[x_0, ..., x_{d-1}]``.
"""

from __future__ import annotations

import csv
import enum
import functools
import io
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .ffield import FieldSpec, GridBudgetError

DEFAULT_GRID_BUDGET = 2**22
BUDGET_ENV = "QAVG_GRID_BUDGET"


def grid_budget() -> int:
    raw = os.environ.get(BUDGET_ENV)
    return int(raw) if raw else DEFAULT_GRID_BUDGET


def check_budget(q: int, d: int, budget: int | None = None) -> None:
    limit = grid_budget() if budget is None else budget
    if q**d > limit:
        raise GridBudgetError(f"grid budget exceeded: q^d = {q}^{d} = {q**d} > {limit}")


class Side(enum.Enum):
    """Which measure a grid is integrated against."""

    SPACE = "dx"  # normalised counting measure
    FREQ = "dm"  # counting measure


@functools.lru_cache(maxsize=32)
def coords(F: FieldSpec, d: int) -> np.ndarray:
    """All points of F_q^d as an ``(q**d, d)`` array of element indices, in grid order."""
    q = F.q
    idx = np.arange(q**d, dtype=np.int64)
    out = np.empty((q**d, d), dtype=np.int64)
    for k in range(d):
        out[:, k] = (idx // q**k) % q
    out.setflags(write=False)
    return out


def flat_index(F: FieldSpec, pts: np.ndarray) -> np.ndarray:
    pts = np.asarray(pts, dtype=np.int64)
    weights = F.q ** np.arange(pts.shape[-1], dtype=np.int64)
    return pts @ weights


def dot(F: FieldSpec, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Field dot product of broadcastable point arrays (last axis = coordinates)."""
    X, Y = np.broadcast_arrays(X, Y)
    acc = F.mul[X[..., 0], Y[..., 0]]
    for k in range(1, X.shape[-1]):
        acc = F.add[acc, F.mul[X[..., k], Y[..., k]]]
    return acc


@functools.lru_cache(maxsize=32)
def negation_index(F: FieldSpec, d: int) -> np.ndarray:
    """Permutation sending the flat index of x to that of -x."""
    perm = flat_index(F, F.neg[coords(F, d)])
    perm.setflags(write=False)
    return perm


def translate_index(F: FieldSpec, d: int, y: np.ndarray, *, subtract: bool = True) -> np.ndarray:
    """Flat indices of ``x - y`` (or ``x + y``) for every grid point x."""
    X = coords(F, d)
    table = F.sub if subtract else F.add
    return flat_index(F, table[X, np.asarray(y, dtype=np.int64)[None, :]])


@dataclass(frozen=True, eq=False)
class GridFunction:
    field: FieldSpec
    d: int
    values: np.ndarray
    side: Side = Side.SPACE

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=np.complex128).reshape(-1)
        if vals.size != self.field.q**self.d:
            raise ValueError(f"expected {self.field.q ** self.d} values, got {vals.size}")
        object.__setattr__(self, "values", vals)

    # -- constructors -----------------------------------------------------

    @classmethod
    def zeros(cls, F: FieldSpec, d: int, side: Side = Side.SPACE) -> "GridFunction":
        return cls(F, d, np.zeros(F.q**d, dtype=np.complex128), side)

    @classmethod
    def constant(cls, F: FieldSpec, d: int, c: complex = 1.0, side: Side = Side.SPACE) -> "GridFunction":
        return cls(F, d, np.full(F.q**d, c, dtype=np.complex128), side)

    @classmethod
    def delta(cls, F: FieldSpec, d: int, side: Side = Side.SPACE) -> "GridFunction":
        g = np.zeros(F.q**d, dtype=np.complex128)
        g[0] = 1.0
        return cls(F, d, g, side)

    @classmethod
    def indicator(cls, F: FieldSpec, d: int, flat: np.ndarray, side: Side = Side.SPACE) -> "GridFunction":
        g = np.zeros(F.q**d, dtype=np.complex128)
        g[np.asarray(flat, dtype=np.int64)] = 1.0
        return cls(F, d, g, side)

    # -- views ------------------------------------------------------------

    @property
    def size(self) -> int:
        return self.values.size

    @property
    def tensor(self) -> np.ndarray:
        return self.values.reshape((self.field.q,) * self.d, order="F")

    def support(self) -> np.ndarray:
        return np.flatnonzero(self.values)

    def at(self, point) -> complex:
        return complex(self.values[int(flat_index(self.field, np.asarray(point)))])

    def reflect(self) -> "GridFunction":
        """x -> f(-x)."""
        return self._like(self.values[negation_index(self.field, self.d)])

    def conj(self) -> "GridFunction":
        return self._like(np.conj(self.values))

    def abs(self) -> "GridFunction":
        return self._like(np.abs(self.values))

    def _like(self, values: np.ndarray) -> "GridFunction":
        return GridFunction(self.field, self.d, values, self.side)

    # -- arithmetic -------------------------------------------------------

    def _check(self, other: "GridFunction") -> None:
        if other.field is not self.field or other.d != self.d:
            raise ValueError("grids live on different spaces")
        if other.side is not self.side:
            raise ValueError(f"cannot mix a {self.side.value} grid with a {other.side.value} grid")

    def __add__(self, other):
        if isinstance(other, GridFunction):
            self._check(other)
            return self._like(self.values + other.values)
        return self._like(self.values + other)

    def __sub__(self, other):
        if isinstance(other, GridFunction):
            self._check(other)
            return self._like(self.values - other.values)
        return self._like(self.values - other)

    def __mul__(self, other):
        if isinstance(other, GridFunction):
            self._check(other)
            return self._like(self.values * other.values)
        return self._like(self.values * other)

    __rmul__ = __mul__

    def __neg__(self):
        return self._like(-self.values)


# ---------------------------------------------------------------------------
# CSV dump
# ---------------------------------------------------------------------------

DUMP_HEADER = ("index", "x_coords", "re", "im")


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def dumps_grid(g: GridFunction) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(DUMP_HEADER)
    X = coords(g.field, g.d)
    for i, v in enumerate(g.values):
        w.writerow((i, ";".join(str(int(c)) for c in X[i]), _fmt(v.real), _fmt(v.imag)))
    return buf.getvalue()


def dump_grid(g: GridFunction, path: str | Path) -> None:
    write_atomic(path, dumps_grid(g))


def load_grid(path: str | Path, F: FieldSpec, d: int, side: Side = Side.SPACE) -> GridFunction:
    vals = np.zeros(F.q**d, dtype=np.complex128)
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            vals[int(row["index"])] = complex(float(row["re"]), float(row["im"]))
    return GridFunction(F, d, vals, side)


def write_atomic(path: str | Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)
