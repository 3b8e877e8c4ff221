"""
Exact linear algebra over the rationals.

Everything here works with :class:`fractions.Fraction` entries; there is no
floating point anywhere. Ranks are computed with fraction-free (Bareiss)
elimination on integer-scaled rows, kernels and solutions with exact
Gauss-Jordan reduction.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

from .errors import NotAComplexError, ParseError

Vector = tuple  # tuple[Fraction, ...]

_RATIONAL_RE = re.compile(r"^[+-]?\d+(/\d+)?$")


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"`` or ``"p"``; decimals and floats are rejected."""
    text = text.strip()
    if not _RATIONAL_RE.match(text):
        raise ParseError(f"not a rational literal: {text!r}")
    try:
        return Fraction(text)
    except ZeroDivisionError:
        raise ParseError(f"zero denominator in {text!r}") from None


def format_rational(value) -> str:
    return str(Fraction(value))


class Matrix:
    """Dense immutable matrix of rationals."""

    __slots__ = ("rows", "cols", "_data")

    def __init__(self, rows: int, cols: int, data: Iterable[Iterable] | None = None):
        self.rows = rows
        self.cols = cols
        if data is None:
            self._data = tuple(tuple(Fraction(0) for _ in range(cols)) for _ in range(rows))
        else:
            self._data = tuple(tuple(Fraction(x) for x in row) for row in data)
            if len(self._data) != rows or any(len(row) != cols for row in self._data):
                raise ValueError(f"data does not have shape {rows}x{cols}")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: int | None = None) -> "Matrix":
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        return cls(len(rows), cols, rows)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], rows: int) -> "Matrix":
        return cls(rows, len(columns), [[c[i] for c in columns] for i in range(rows)])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Matrix":
        return cls(rows, cols)

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls(n, n, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def diagonal(cls, entries: Sequence) -> "Matrix":
        n = len(entries)
        return cls(n, n, [[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, key) -> Fraction:
        i, j = key
        return self._data[i][j]

    def row(self, i: int) -> Vector:
        return self._data[i]

    def column(self, j: int) -> Vector:
        return tuple(row[j] for row in self._data)

    def to_rows(self) -> list[list[Fraction]]:
        return [list(row) for row in self._data]

    def transpose(self) -> "Matrix":
        return Matrix(self.cols, self.rows, [self.column(j) for j in range(self.cols)])

    def is_zero(self) -> bool:
        return all(x == 0 for row in self._data for x in row)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self._data == other._data

    def __hash__(self):
        return hash((self.rows, self.cols, self._data))

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check_same_shape(other)
        return Matrix(self.rows, self.cols,
                      [[a + b for a, b in zip(r, s)] for r, s in zip(self._data, other._data)])

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check_same_shape(other)
        return Matrix(self.rows, self.cols,
                      [[a - b for a, b in zip(r, s)] for r, s in zip(self._data, other._data)])

    def __neg__(self) -> "Matrix":
        return Matrix(self.rows, self.cols, [[-a for a in r] for r in self._data])

    def scale(self, c) -> "Matrix":
        c = Fraction(c)
        return Matrix(self.rows, self.cols, [[c * a for a in r] for r in self._data])

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        cols = [other.column(j) for j in range(other.cols)]
        return Matrix(self.rows, other.cols,
                      [[sum((a * b for a, b in zip(r, c)), Fraction(0)) for c in cols]
                       for r in self._data])

    def apply(self, v: Sequence) -> Vector:
        if len(v) != self.cols:
            raise ValueError(f"vector of length {len(v)} for {self.shape} matrix")
        return tuple(sum((a * b for a, b in zip(r, v)), Fraction(0)) for r in self._data)

    def determinant(self) -> Fraction:
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        n = self.rows
        if n == 0:
            return Fraction(1)
        rows, scale = _integer_rows(self)
        sign = 1
        prev = 1
        for k in range(n - 1):
            if rows[k][k] == 0:
                for i in range(k + 1, n):
                    if rows[i][k] != 0:
                        rows[k], rows[i] = rows[i], rows[k]
                        sign = -sign
                        break
                else:
                    return Fraction(0)
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    rows[i][j] = (rows[i][j] * rows[k][k] - rows[i][k] * rows[k][j]) // prev
                rows[i][k] = 0
            prev = rows[k][k]
        return Fraction(sign * rows[n - 1][n - 1], scale)

    def is_invertible(self) -> bool:
        return self.rows == self.cols and self.determinant() != 0

    def inverse(self) -> "Matrix":
        if self.rows != self.cols:
            raise ValueError("inverse of a non-square matrix")
        n = self.rows
        aug = Matrix(n, 2 * n, [list(r) + [1 if i == j else 0 for j in range(n)]
                                for i, r in enumerate(self._data)])
        reduced, pivots = rref(aug)
        if pivots[:n] != list(range(n)):
            raise ValueError("matrix is singular")
        return Matrix(n, n, [row[n:] for row in reduced[:n]])

    def _check_same_shape(self, other):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    def __repr__(self):
        body = "; ".join(" ".join(str(x) for x in row) for row in self._data)
        return f"Matrix({self.rows}x{self.cols}: [{body}])"


def _integer_rows(m: Matrix) -> tuple[list[list[int]], int]:
    """Scale every row to integers; returns the rows and the product of the scales."""
    out = []
    scale = 1
    for row in m.to_rows():
        den = lcm(*(x.denominator for x in row)) if row else 1
        out.append([int(x * den) for x in row])
        scale *= den
    return out, scale


def rank(m: Matrix) -> int:
    """Rank by fraction-free Gaussian elimination."""
    rows, _ = _integer_rows(m)
    nrows, ncols = m.rows, m.cols
    r = 0
    prev = 1
    for c in range(ncols):
        if r == nrows:
            break
        for i in range(r, nrows):
            if rows[i][c] != 0:
                break
        else:
            continue
        if i != r:
            rows[r], rows[i] = rows[i], rows[r]
        piv = rows[r][c]
        for i in range(r + 1, nrows):
            ric = rows[i][c]
            row_i = rows[i]
            row_r = rows[r]
            for j in range(c, ncols):
                row_i[j] = (piv * row_i[j] - ric * row_r[j]) // prev
        prev = piv
        r += 1
    return r


def rref(m: Matrix) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form and pivot columns."""
    a = m.to_rows()
    pivots = []
    r = 0
    for c in range(m.cols):
        if r == m.rows:
            break
        piv = next((i for i in range(r, m.rows) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(m.rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return a, pivots


def kernel_basis(m: Matrix) -> list[Vector]:
    reduced, pivots = rref(m)
    free = [c for c in range(m.cols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [Fraction(0)] * m.cols
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -reduced[i][f]
        basis.append(tuple(v))
    return basis


def image_basis(m: Matrix) -> list[Vector]:
    """Independent columns of ``m`` spanning its column space."""
    _, pivots = rref(m)
    return [m.column(c) for c in pivots]


def solve(a: Matrix, b: Sequence) -> Vector | None:
    """One solution of ``a x = b``, or None when the system is inconsistent."""
    if len(b) != a.rows:
        raise ValueError("right-hand side has the wrong length")
    aug = Matrix(a.rows, a.cols + 1, [list(r) + [b[i]] for i, r in enumerate(a.to_rows())])
    reduced, pivots = rref(aug)
    if pivots and pivots[-1] == a.cols:
        return None
    x = [Fraction(0)] * a.cols
    for i, p in enumerate(pivots):
        x[p] = reduced[i][a.cols]
    return tuple(x)


@dataclass(frozen=True)
class RationalComplex:
    """Finite cochain complex ``V^start -> V^{start+1} -> ...``.

    ``differentials[k]`` maps degree ``start + k`` to ``start + k + 1`` and has
    shape ``(dims[k+1], dims[k])``.
    """

    start: int
    dims: tuple[int, ...]
    differentials: tuple[Matrix, ...]

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(self.dims))
        object.__setattr__(self, "differentials", tuple(self.differentials))
        if len(self.differentials) != max(len(self.dims) - 1, 0):
            raise NotAComplexError(
                f"{len(self.dims)} spaces need {max(len(self.dims) - 1, 0)} differentials")
        for k, d in enumerate(self.differentials):
            if d.shape != (self.dims[k + 1], self.dims[k]):
                raise NotAComplexError(
                    f"differential in degree {self.start + k} has shape {d.shape}, "
                    f"expected {(self.dims[k + 1], self.dims[k])}")

    @property
    def degrees(self) -> range:
        return range(self.start, self.start + len(self.dims))

    def dim(self, degree: int) -> int:
        k = degree - self.start
        return self.dims[k] if 0 <= k < len(self.dims) else 0

    def differential(self, degree: int) -> Matrix:
        """The map out of ``degree``; zero outside the stored range."""
        k = degree - self.start
        if 0 <= k < len(self.differentials):
            return self.differentials[k]
        return Matrix.zeros(self.dim(degree + 1), self.dim(degree))

    def euler_characteristic(self) -> int:
        return sum(self.dim(d) if d % 2 == 0 else -self.dim(d) for d in self.degrees)

    def check(self) -> None:
        for k in range(len(self.differentials) - 1):
            if not (self.differentials[k + 1] @ self.differentials[k]).is_zero():
                raise NotAComplexError(f"d^2 != 0 starting in degree {self.start + k}")


@dataclass
class Cohomology:
    """Cohomology dimensions of a complex, optionally with representatives.

    ``representatives[d]`` is a list of cocycles whose classes form a basis of
    ``H^d``; ``coordinates`` expresses any cocycle in that basis.
    """

    complex: RationalComplex
    dims: dict[int, int]
    representatives: dict[int, list[Vector]] = field(default_factory=dict)
    _boundaries: dict[int, list[Vector]] = field(default_factory=dict, repr=False)

    def dim(self, degree: int) -> int:
        return self.dims.get(degree, 0)

    def vector(self) -> list[int]:
        return [self.dims[d] for d in sorted(self.dims)]

    def coordinates(self, degree: int, cocycle: Sequence) -> Vector:
        if degree not in self.representatives:
            raise ValueError("representatives were not computed")
        if any(self.complex.differential(degree).apply(cocycle)):
            raise ValueError(f"vector is not a cocycle in degree {degree}")
        reps = self.representatives[degree]
        if not reps:
            return ()
        bounds = self._boundaries[degree]
        a = Matrix.from_columns(bounds + reps, self.complex.dim(degree))
        x = solve(a, cocycle)
        assert x is not None
        return x[len(bounds):]


def cohomology(c: RationalComplex, bases: bool = False) -> Cohomology:
    """dim H^d = dim ker d_d - rank d_{d-1}; rejects complexes with d^2 != 0."""
    c.check()
    dims = {}
    reps: dict[int, list[Vector]] = {}
    bounds: dict[int, list[Vector]] = {}
    for d in c.degrees:
        out = c.differential(d)
        inc = c.differential(d - 1)
        if not bases:
            dims[d] = c.dim(d) - rank(out) - rank(inc)
            continue
        boundary = image_basis(inc)
        cycles = kernel_basis(out)
        chosen: list[Vector] = []
        current = rank(Matrix.from_columns(boundary, c.dim(d))) if boundary else 0
        for z in cycles:
            trial = Matrix.from_columns(boundary + chosen + [z], c.dim(d))
            if rank(trial) > current:
                chosen.append(z)
                current += 1
        dims[d] = len(chosen)
        reps[d] = chosen
        bounds[d] = boundary
    return Cohomology(c, dims, reps, bounds)
