"""
Free graded-commutative dg-algebras generated in degrees <= 0.

Generators carry an integer degree; odd-degree generators anticommute and
square to zero. A monomial is stored in canonical order (generators sorted
by label), and every reordering needed to reach that order contributes the
Koszul sign ``(-1)^{|a||b|}`` for each transposition of adjacent factors.

Points are rational values for the degree-0 generators; negative-degree
generators vanish at every point. Taylor components at a point expand the
differential in the displacements of the degree-0 generators together with
the negative-degree generators, all treated as the expansion variables.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import comb
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

from .errors import InvalidPointError
from .exactlin import Matrix, RationalComplex


@dataclass(frozen=True, order=True)
class Generator:
    label: str
    degree: int

    def __post_init__(self):
        if self.degree > 0:
            raise ValueError(f"generator {self.label} has positive degree {self.degree}")

    @property
    def odd(self) -> bool:
        return self.degree % 2 == 1

    def __str__(self):
        return self.label


# a monomial is a tuple of (generator, exponent) pairs sorted by generator
Monomial = tuple


def _monomial_degree(m: Monomial) -> int:
    return sum(g.degree * e for g, e in m)


def _word_length(m: Monomial) -> int:
    return sum(e for _, e in m)


def _merge(left: Monomial, right: Monomial):
    """Product of two canonical monomials as (sign, monomial), or None if it vanishes."""
    if not left:
        return 1, right
    if not right:
        return 1, left
    sign = 1
    # odd factors of `left` that are larger than a given odd factor of `right`
    # must be passed over when sorting the concatenation
    left_odd = [g for g, _ in left if g.odd]
    out = dict(left)
    for g, e in right:
        if g.odd:
            if g in out:
                return None
            passed = sum(1 for h in left_odd if h > g)
            if passed % 2:
                sign = -sign
        out[g] = out.get(g, 0) + e
    return sign, tuple(sorted(out.items()))


class Polynomial:
    """Rational linear combination of canonical monomials."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Monomial, Fraction] | None = None):
        self._terms = {m: Fraction(c) for m, c in (terms or {}).items() if c != 0}

    @classmethod
    def constant(cls, c) -> "Polynomial":
        return cls({(): Fraction(c)})

    @classmethod
    def gen(cls, g: Generator, coeff=1) -> "Polynomial":
        return cls({((g, 1),): Fraction(coeff)})

    @classmethod
    def from_factors(cls, factors: Sequence[Generator], coeff=1) -> "Polynomial":
        """Product of the factors in the given order."""
        out = cls.constant(coeff)
        for g in factors:
            out = out * cls.gen(g)
        return out

    @property
    def terms(self) -> Mapping[Monomial, Fraction]:
        return MappingProxyType(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def generators(self) -> set[Generator]:
        return {g for m in self._terms for g, _ in m}

    def degrees(self) -> set[int]:
        return {_monomial_degree(m) for m in self._terms}

    @property
    def degree(self) -> int:
        """Degree of a homogeneous polynomial; zero counts as degree 0."""
        ds = self.degrees()
        if len(ds) > 1:
            raise ValueError(f"polynomial is not homogeneous: degrees {sorted(ds)}")
        return ds.pop() if ds else 0

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def word_lengths(self) -> set[int]:
        return {_word_length(m) for m in self._terms}

    def homogeneous_part(self, n: int) -> "Polynomial":
        return Polynomial({m: c for m, c in self._terms.items() if _word_length(m) == n})

    def __add__(self, other) -> "Polynomial":
        other = _coerce(other)
        out = dict(self._terms)
        for m, c in other._terms.items():
            out[m] = out.get(m, 0) + c
        return Polynomial(out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial({m: -c for m, c in self._terms.items()})

    def __sub__(self, other) -> "Polynomial":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "Polynomial":
        return _coerce(other) - self

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            return Polynomial({m: c * other for m, c in self._terms.items()})
        out: dict = defaultdict(Fraction)
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                merged = _merge(m1, m2)
                if merged is None:
                    continue
                sign, m = merged
                out[m] += sign * c1 * c2
        return Polynomial(out)

    def __rmul__(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            return self * other
        return NotImplemented

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def evaluate(self, point: Mapping[Generator, Fraction]) -> Fraction:
        """Value at a point; negative-degree generators evaluate to zero."""
        total = Fraction(0)
        for m, c in self._terms.items():
            value = c
            for g, e in m:
                if g.degree != 0:
                    value = Fraction(0)
                    break
                value *= Fraction(point[g]) ** e
            total += value
        return total

    def substitute(self, images: Mapping[Generator, "Polynomial"]) -> "Polynomial":
        """Apply the algebra morphism sending each generator to ``images[g]``.

        Images must be homogeneous of the generator's degree; generators not
        listed are left unchanged.
        """
        out = Polynomial()
        for m, c in self._terms.items():
            term = Polynomial.constant(c)
            for g, e in m:
                img = images.get(g)
                if img is None:
                    img = Polynomial.gen(g)
                for _ in range(e):
                    term = term * img
            out = out + term
        return out

    def shift(self, point: Mapping[Generator, Fraction], max_length: int | None = None) -> "Polynomial":
        """Rewrite in displacement coordinates around ``point``.

        Each degree-0 generator x becomes x(point) + x, where the new x is the
        displacement. Terms longer than ``max_length`` are dropped.
        """
        out: dict = defaultdict(Fraction)
        for m, c in self._terms.items():
            even0 = [(g, e) for g, e in m if g.degree == 0]
            rest = [(g, e) for g, e in m if g.degree != 0]
            base = _word_length(tuple(rest))
            if max_length is not None and base > max_length:
                continue
            for ks in product(*(range(e + 1) for _, e in even0)):
                if max_length is not None and base + sum(ks) > max_length:
                    continue
                coeff = c
                for (g, e), k in zip(even0, ks):
                    coeff *= comb(e, k) * Fraction(point[g]) ** (e - k)
                if coeff == 0:
                    continue
                kept = [(g, k) for (g, _), k in zip(even0, ks) if k] + rest
                out[tuple(sorted(kept))] += coeff
        return Polynomial(out)

    def __repr__(self):
        if not self._terms:
            return "0"
        parts = []
        for m, c in sorted(self._terms.items(), key=lambda t: [(str(g), e) for g, e in t[0]]):
            mono = "*".join(f"{g}^{e}" if e > 1 else str(g) for g, e in m)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append(f"-{mono}")
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


def _coerce(x) -> Polynomial:
    if isinstance(x, Polynomial):
        return x
    return Polynomial.constant(x)


def multiply(p: Polynomial, q: Polynomial) -> Polynomial:
    return p * q


def derivative(p: Polynomial, g: Generator) -> Polynomial:
    """Left partial derivative: move ``g`` to the front with its Koszul sign, then drop it."""
    out: dict = defaultdict(Fraction)
    for m, c in p.terms.items():
        before = 0
        for idx, (h, e) in enumerate(m):
            if h == g:
                sign = -1 if (g.odd and before % 2) else 1
                rest = list(m)
                if e == 1:
                    del rest[idx]
                else:
                    rest[idx] = (h, e - 1)
                out[tuple(rest)] += sign * e * c
                break
            before += h.degree * e
    return Polynomial(out)


@dataclass(frozen=True)
class DgPresentation:
    """Generators, the differential on generators, and invertibility constraints."""

    generators: tuple[Generator, ...]
    differential: Mapping[Generator, Polynomial] = field(hash=False)
    constraints: tuple[Polynomial, ...] = ()
    name: str = ""

    def __post_init__(self):
        gens = tuple(sorted(self.generators))
        object.__setattr__(self, "generators", gens)
        known = set(gens)
        if len(known) != len(gens):
            raise ValueError("duplicate generators")
        labels = [g.label for g in gens]
        if len(set(labels)) != len(labels):
            raise ValueError("generator labels must be unique")
        diff = {}
        for g in gens:
            dg = self.differential.get(g, Polynomial())
            if not dg.is_zero():
                if g.degree == 0:
                    raise ValueError(f"degree-0 generator {g} has nonzero differential")
                if dg.degrees() != {g.degree + 1}:
                    raise ValueError(f"d({g}) is not homogeneous of degree {g.degree + 1}")
                unknown = dg.generators() - known
                if unknown:
                    raise ValueError(f"d({g}) uses unknown generators {sorted(map(str, unknown))}")
            diff[g] = dg
        extra = set(self.differential) - known
        if extra:
            raise ValueError(f"differential given on unknown generators {sorted(map(str, extra))}")
        object.__setattr__(self, "differential", MappingProxyType(diff))
        object.__setattr__(self, "constraints", tuple(self.constraints))

    def generator(self, label: str) -> Generator:
        for g in self.generators:
            if g.label == label:
                return g
        raise KeyError(label)

    def of_degree(self, degree: int) -> list[Generator]:
        return [g for g in self.generators if g.degree == degree]

    @property
    def min_degree(self) -> int:
        return min((g.degree for g in self.generators), default=0)

    def counts_by_degree(self) -> dict[int, int]:
        out: dict[int, int] = defaultdict(int)
        for g in self.generators:
            out[g.degree] += 1
        return dict(sorted(out.items(), reverse=True))

    def d(self, p: Polynomial) -> Polynomial:
        return apply_differential(self, p)

    def dump(self) -> str:
        lines = [f"presentation {self.name}".rstrip()]
        for g in self.generators:
            lines.append(f"  {g} [{g.degree}]: d = {self.differential[g]!r}")
        for c in self.constraints:
            lines.append(f"  nonzero: {c!r}")
        return "\n".join(lines)


def apply_differential(pres: DgPresentation, p: Polynomial) -> Polynomial:
    """Extend d from generators by the graded Leibniz rule."""
    out = Polynomial()
    for m, c in p.terms.items():
        factors = [g for g, e in m for _ in range(e)]
        sign_deg = 0
        for i, g in enumerate(factors):
            if g not in pres.differential:
                raise KeyError(f"unknown generator {g}")
            dg = pres.differential[g]
            if not dg.is_zero():
                left = Polynomial.from_factors(factors[:i], c if sign_deg % 2 == 0 else -c)
                right = Polynomial.from_factors(factors[i + 1:])
                out = out + left * dg * right
            sign_deg += g.degree
    return out


@dataclass(frozen=True)
class DSquaredReport:
    ok: bool
    generator: Generator | None = None
    residual: Polynomial | None = None

    def __bool__(self):
        return self.ok


def check_d_squared(pres: DgPresentation) -> DSquaredReport:
    for g in pres.generators:
        dd = apply_differential(pres, pres.differential[g])
        if not dd.is_zero():
            return DSquaredReport(False, g, dd)
    return DSquaredReport(True)


# -- points ------------------------------------------------------------------

Point = Mapping[Generator, Fraction]


def check_point(pres: DgPresentation, point: Point) -> None:
    """Raise InvalidPointError unless ``point`` is a rational point of pi_0."""
    for g in pres.of_degree(0):
        if g not in point:
            raise InvalidPointError(f"no value for degree-0 generator {g}")
    for c in pres.constraints:
        if c.evaluate(point) == 0:
            raise InvalidPointError(f"invertibility constraint {c!r} vanishes")
    for g in pres.of_degree(-1):
        value = pres.differential[g].evaluate(point)
        if value != 0:
            raise InvalidPointError(f"d({g}) = {value} at the point, so it is off pi_0")


def taylor_part(pres: DgPresentation, point: Point, n: int) -> dict[Generator, Polynomial]:
    """Word-length-n part of d(v) in displacement coordinates, for every generator v."""
    check_point(pres, point)
    return {v: pres.differential[v].shift(point, max_length=n).homogeneous_part(n)
            for v in pres.generators}


def tangent_basis(pres: DgPresentation) -> dict[int, list[Generator]]:
    """Tangent degree k is dual to the generators of degree -k."""
    return {k: pres.of_degree(-k) for k in range(0, -pres.min_degree + 1)}


def linearize_at_point(pres: DgPresentation, point: Point) -> RationalComplex:
    """The tangent complex: entry (v, w) of T^k -> T^{k+1} is the coefficient of w in d(v)."""
    linear = taylor_part(pres, point, 1)
    basis = tangent_basis(pres)
    top = max(basis)
    mats = []
    for k in range(top):
        cols = {w: j for j, w in enumerate(basis[k])}
        rows = basis[k + 1]
        data = [[Fraction(0)] * len(cols) for _ in rows]
        for i, v in enumerate(rows):
            for m, c in linear[v].terms.items():
                ((w, _),) = m
                data[i][cols[w]] += c
        mats.append(Matrix(len(rows), len(cols), data))
    return RationalComplex(0, tuple(len(basis[k]) for k in range(top + 1)), tuple(mats))


@dataclass(frozen=True)
class MultilinearMap:
    """Structure constants of an n-ary Taylor component.

    ``constants[(a_1, ..., a_n)][v]`` is the iterated left derivative
    d/da_n ... d/da_1 of the word-length-n part of d(v).
    """

    arity: int
    constants: Mapping[tuple, Mapping[Generator, Fraction]]

    def is_zero(self) -> bool:
        return all(c == 0 for out in self.constants.values() for c in out.values())

    def __call__(self, *vectors: Mapping[Generator, Fraction]) -> dict[Generator, Fraction]:
        if len(vectors) != self.arity:
            raise ValueError(f"expected {self.arity} arguments")
        out: dict = defaultdict(Fraction)
        for key, values in self.constants.items():
            scale = Fraction(1)
            for vec, g in zip(vectors, key):
                scale *= vec.get(g, 0)
                if scale == 0:
                    break
            if scale:
                for v, c in values.items():
                    out[v] += scale * c
        return {v: c for v, c in out.items() if c}


def _iterated_derivatives(p: Polynomial, n: int, prefix: tuple = ()):
    if n == 0:
        c = p.terms.get((), Fraction(0))
        if c:
            yield prefix, c
        return
    for g in sorted(p.generators()):
        q = derivative(p, g)
        if not q.is_zero():
            yield from _iterated_derivatives(q, n - 1, prefix + (g,))


def taylor_component(pres: DgPresentation, point: Point, n: int) -> MultilinearMap:
    if n < 1:
        raise ValueError("Taylor components start at arity 1")
    part = taylor_part(pres, point, n)
    constants: dict = defaultdict(dict)
    for v, poly in part.items():
        for key, c in _iterated_derivatives(poly, n):
            constants[key][v] = c
    return MultilinearMap(n, {k: MappingProxyType(v) for k, v in constants.items()})


class TangentLieStructure:
    """The tangent complex at a point, regraded as a dg Lie algebra.

    The generator of degree j corresponds to a basis vector of Lie degree
    1 - j (tangent degree k sits in Lie degree k + 1). With the sign
    conventions below the unary bracket is a derivation of the binary one,
    and the binary bracket is graded antisymmetric; when the differential is
    quadratic the Jacobi identity holds on the nose.
    """

    def __init__(self, pres: DgPresentation, point: Point):
        self.presentation = pres
        self.point = point
        self.basis = tangent_basis(pres)
        self.unary = taylor_component(pres, point, 1)
        self.binary = taylor_component(pres, point, 2)
        self._unary_images: dict = defaultdict(dict)
        for (w,), values in self.unary.constants.items():
            self._unary_images[w] = values

    @staticmethod
    def lie_degree(g: Generator) -> int:
        return 1 - g.degree

    def vector_degree(self, vec: Mapping[Generator, Fraction]) -> int:
        ds = {self.lie_degree(g) for g, c in vec.items() if c}
        if len(ds) > 1:
            raise ValueError("vector is not homogeneous")
        return ds.pop() if ds else 0

    def differential(self, vec: Mapping[Generator, Fraction]) -> dict[Generator, Fraction]:
        out: dict = defaultdict(Fraction)
        for w, x in vec.items():
            if not x:
                continue
            sign = -1 if self.lie_degree(w) % 2 else 1
            for v, c in self._unary_images.get(w, {}).items():
                out[v] += sign * x * c
        return {v: c for v, c in out.items() if c}

    def bracket(self, x: Mapping[Generator, Fraction], y: Mapping[Generator, Fraction]) -> dict[Generator, Fraction]:
        out: dict = defaultdict(Fraction)
        for (a, b), values in self.binary.constants.items():
            s = x.get(a, 0) * y.get(b, 0)
            if not s:
                continue
            if b.odd and not a.odd:
                s = -s
            for v, c in values.items():
                out[v] += s * c
        return {v: c for v, c in out.items() if c}

    def to_dense(self, vec: Mapping[Generator, Fraction], k: int) -> tuple:
        return tuple(Fraction(vec.get(g, 0)) for g in self.basis.get(k, []))

    def from_dense(self, values: Sequence, k: int) -> dict[Generator, Fraction]:
        return {g: Fraction(c) for g, c in zip(self.basis[k], values) if c}


def add_vectors(*vecs: Mapping[Generator, Fraction], scales: Iterable | None = None) -> dict:
    out: dict = defaultdict(Fraction)
    scales = list(scales) if scales is not None else [1] * len(vecs)
    for vec, s in zip(vecs, scales):
        for g, c in vec.items():
            out[g] += s * c
    return {g: c for g, c in out.items() if c}


def determinant(entries: Sequence[Sequence[Polynomial]]) -> Polynomial:
    """Leibniz expansion; entries are assumed to be even (degree 0)."""
    from itertools import permutations

    n = len(entries)
    total = Polynomial()
    for perm in permutations(range(n)):
        inversions = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = Polynomial.constant(-1 if inversions % 2 else 1)
        for i in range(n):
            term = term * entries[i][perm[i]]
        total = total + term
    return total
