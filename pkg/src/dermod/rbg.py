"""
The explicit quasi-free resolution RB_n GL(r).

Generators are the matrix entries of g_{i_0...i_p} for 0 <= i_0 < ... < i_p <= n,
p >= 1, in degree 1 - p, with

    d g_{i_0..i_p} = sum_{nu=1}^{p-1} (-1)^nu (g_{i_0..^i_nu..i_p} - g_{i_nu..i_p} g_{i_0..i_nu})

as a matrix identity. In the graded algebra the product block is
``(-1)^{|back||front|} sum_c front[c, b] back[a, c]``; this only differs
from the naive entrywise product when both blocks are odd (first at p = 4),
and without it d^2 != 0 there. The edge blocks carry the constraint
det(g_{ij}) != 0.
Simplicial structure maps and gauge transformations are returned as algebra
morphisms between presentations (pullbacks of the corresponding maps of
dg-schemes), so they compose contravariantly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Mapping, Sequence

from .dgalg import (
    DgPresentation,
    Generator,
    Polynomial,
    apply_differential,
    check_d_squared,
    check_point,
    determinant,
    linearize_at_point,
)
from .errors import InvalidPointError
from .exactlin import Matrix, cohomology

PolyMatrix = list  # list[list[Polynomial]]


def simplex_label(t: Sequence[int], n: int) -> str:
    return ("" if n < 10 else ",").join(str(i) for i in t)


def entry_label(simplex_id: str, a: int, b: int) -> str:
    """Label of the (a, b) entry (0-based) of the block on ``simplex_id``."""
    return f"g{simplex_id}[{a + 1},{b + 1}]"


def block(simplex_id: str, dim: int, r: int) -> list[list[Generator]]:
    return [[Generator(entry_label(simplex_id, a, b), 1 - dim) for b in range(r)] for a in range(r)]


def poly_block(simplex_id: str, dim: int, r: int) -> PolyMatrix:
    return [[Polynomial.gen(g) for g in row] for row in block(simplex_id, dim, r)]


def matmul(x: PolyMatrix, y: PolyMatrix) -> PolyMatrix:
    r = len(x)
    return [[sum((x[a][c] * y[c][b] for c in range(r)), Polynomial()) for b in range(r)]
            for a in range(r)]


def matsub(x: PolyMatrix, y: PolyMatrix) -> PolyMatrix:
    return [[p - q for p, q in zip(rx, ry)] for rx, ry in zip(x, y)]


def graded_product(back: PolyMatrix, front: PolyMatrix, back_dim: int, front_dim: int) -> PolyMatrix:
    """Matrix product back . front with the Koszul sign of the two blocks."""
    prod = matmul(back, front)
    if (1 - back_dim) % 2 and (1 - front_dim) % 2:
        return [[-x for x in row] for row in prod]
    return prod


def constant_block(m: Matrix) -> PolyMatrix:
    return [[Polynomial.constant(m[a, b]) for b in range(m.cols)] for a in range(m.rows)]


@dataclass(frozen=True)
class RBPresentation:
    n: int
    r: int
    presentation: DgPresentation

    def tuples(self, p: int | None = None) -> list[tuple[int, ...]]:
        ps = range(1, self.n + 1) if p is None else [p]
        return [t for q in ps for t in combinations(range(self.n + 1), q + 1)]

    def label(self, t: Sequence[int]) -> str:
        return simplex_label(t, self.n)

    def block(self, t: Sequence[int]) -> list[list[Generator]]:
        return block(self.label(t), len(t) - 1, self.r)

    def poly_block(self, t: Sequence[int]) -> PolyMatrix:
        return poly_block(self.label(t), len(t) - 1, self.r)

    def d_block(self, t: Sequence[int]) -> PolyMatrix:
        return [[self.presentation.differential[g] for g in row] for row in self.block(t)]


def build_rb(n: int, r: int) -> RBPresentation:
    if n < 0 or r < 1:
        raise ValueError("need n >= 0 and r >= 1")
    gens = []
    diff = {}
    constraints = []
    for p in range(1, n + 1):
        for t in combinations(range(n + 1), p + 1):
            lab = simplex_label(t, n)
            gens.extend(g for row in block(lab, p, r) for g in row)
            if p == 1:
                constraints.append(determinant(poly_block(lab, 1, r)))
                continue
            total = [[Polynomial() for _ in range(r)] for _ in range(r)]
            for nu in range(1, p):
                omit = t[:nu] + t[nu + 1:]
                back = t[nu:]
                front = t[:nu + 1]
                term = matsub(poly_block(simplex_label(omit, n), p - 1, r),
                              graded_product(poly_block(simplex_label(back, n), p - nu, r),
                                             poly_block(simplex_label(front, n), nu, r),
                                             p - nu, nu))
                sign = -1 if nu % 2 else 1
                total = [[x + sign * y for x, y in zip(rt, rs)] for rt, rs in zip(total, term)]
            for row_g, row_d in zip(block(lab, p, r), total):
                for g, dg in zip(row_g, row_d):
                    diff[g] = dg
    pres = DgPresentation(tuple(gens), diff, tuple(constraints), name=f"RB_{n}GL({r})")
    return RBPresentation(n, r, pres)


# -- algebra morphisms ---------------------------------------------------------

@dataclass(frozen=True)
class AlgebraMorphism:
    """Graded algebra map source -> target, given on the source generators."""

    source: DgPresentation
    target: DgPresentation
    images: Mapping[Generator, Polynomial] = field(hash=False)

    def __call__(self, p: Polynomial) -> Polynomial:
        return p.substitute(self.images)

    def commutes_with_d(self) -> Generator | None:
        """First source generator where f(d y) != d(f y), or None."""
        for y in self.source.generators:
            lhs = self(self.source.differential[y])
            rhs = apply_differential(self.target, self.images[y])
            if lhs != rhs:
                return y
        return None

    def same_as(self, other: "AlgebraMorphism") -> bool:
        return all(self.images[y] == other.images[y] for y in self.source.generators)


def compose(outer: AlgebraMorphism, inner: AlgebraMorphism) -> AlgebraMorphism:
    """``outer o inner``: first ``inner``, then ``outer``."""
    return AlgebraMorphism(inner.source, outer.target,
                           {y: outer(img) for y, img in inner.images.items()})


def identity_morphism(pres: DgPresentation) -> AlgebraMorphism:
    return AlgebraMorphism(pres, pres, {g: Polynomial.gen(g) for g in pres.generators})


def _relabel_morphism(src: RBPresentation, tgt: RBPresentation, relabel) -> AlgebraMorphism:
    images = {}
    r = src.r
    for t in src.tuples():
        u = tuple(relabel(i) for i in t)
        gens = src.block(t)
        if all(a < b for a, b in zip(u, u[1:])):
            img = tgt.poly_block(u)
        elif len(t) == 2:
            img = constant_block(Matrix.identity(r))
        else:
            img = [[Polynomial() for _ in range(r)] for _ in range(r)]
        for row_g, row_i in zip(gens, img):
            for g, p in zip(row_g, row_i):
                images[g] = p
    return AlgebraMorphism(src.presentation, tgt.presentation, images)


_RB_CACHE: dict[tuple[int, int], RBPresentation] = {}


def cached_rb(n: int, r: int) -> RBPresentation:
    key = (n, r)
    if key not in _RB_CACHE:
        _RB_CACHE[key] = build_rb(n, r)
    return _RB_CACHE[key]


def face_map(pres: RBPresentation, i: int) -> AlgebraMorphism:
    """Pullback along the face d_i: RB_n -> RB_{n-1}; relabels by the coface skipping i."""
    n = pres.n
    if n < 1 or not 0 <= i <= n:
        raise ValueError(f"face index {i} invalid at level {n}")
    lower = cached_rb(n - 1, pres.r)
    return _relabel_morphism(lower, pres, lambda j: j if j < i else j + 1)


def degeneracy_map(pres: RBPresentation, j: int) -> AlgebraMorphism:
    """Pullback along s_j: RB_n -> RB_{n+1}; relabels by the codegeneracy collapsing j, j+1.

    A collapsed edge goes to the identity matrix, a collapsed higher block to 0.
    """
    n = pres.n
    if not 0 <= j <= n:
        raise ValueError(f"degeneracy index {j} invalid at level {n}")
    upper = cached_rb(n + 1, pres.r)
    return _relabel_morphism(upper, pres, lambda k: k if k <= j else k - 1)


def gauge_transform(pres: RBPresentation, family: Sequence[Matrix]) -> AlgebraMorphism:
    """Pullback of (g_{i_0..i_p}) -> (h_{i_p} g_{i_0..i_p} h_{i_0}^{-1})."""
    if len(family) != pres.n + 1:
        raise ValueError(f"need {pres.n + 1} matrices, got {len(family)}")
    for k, h in enumerate(family):
        if h.shape != (pres.r, pres.r) or not h.is_invertible():
            raise ValueError(f"gauge matrix at vertex {k} is not an invertible {pres.r}x{pres.r} matrix")
    inverses = [h.inverse() for h in family]
    images = {}
    for t in pres.tuples():
        img = matmul(matmul(constant_block(family[t[-1]]), pres.poly_block(t)),
                     constant_block(inverses[t[0]]))
        for row_g, row_i in zip(pres.block(t), img):
            for g, p in zip(row_g, row_i):
                images[g] = p
    return AlgebraMorphism(pres.presentation, pres.presentation, images)


# -- points ------------------------------------------------------------------

FlatPoint = Mapping[tuple[int, int], Matrix]


def random_invertible(r: int, rng: random.Random, bound: int = 3) -> Matrix:
    while True:
        m = Matrix(r, r, [[rng.randint(-bound, bound) for _ in range(r)] for _ in range(r)])
        if m.determinant() != 0:
            return m


def flat_point(consecutive: Sequence[Matrix]) -> dict[tuple[int, int], Matrix]:
    """All g_{ik} from the consecutive edges, g_{ik} = g_{k-1,k} ... g_{i,i+1}."""
    n = len(consecutive)
    out = {}
    for i in range(n + 1):
        acc = None
        for k in range(i + 1, n + 1):
            acc = consecutive[k - 1] if acc is None else consecutive[k - 1] @ acc
            out[(i, k)] = acc
    return out


def random_flat_point(n: int, r: int, rng: random.Random) -> dict[tuple[int, int], Matrix]:
    return flat_point([random_invertible(r, rng) for _ in range(n)])


def is_flat_point(point: FlatPoint, n: int) -> bool:
    return all(point[(j, k)] @ point[(i, j)] == point[(i, k)]
               for i, j, k in combinations(range(n + 1), 3))


def point_values(pres: RBPresentation, point: FlatPoint) -> dict[Generator, Fraction]:
    values = {}
    for t in pres.tuples(1):
        m = point[t]
        for a, row in enumerate(pres.block(t)):
            for b, g in enumerate(row):
                values[g] = m[a, b]
    return values


def evaluate_morphism_on_point(f: AlgebraMorphism, values: Mapping[Generator, Fraction]) -> dict:
    """The pulled-back point: source degree-0 generator y gets f(y) evaluated at ``values``."""
    return {y: f.images[y].evaluate(values) for y in f.source.of_degree(0)}


# -- verification obligations ----------------------------------------------------

@dataclass(frozen=True)
class InjectivityReport:
    n: int
    r: int
    total_by_degree: dict
    boundary_by_degree: dict
    new_by_degree: dict
    closed_under_d: bool
    ok: bool


def injectivity_skeleton_check(n: int, r: int) -> InjectivityReport:
    """RB_n is free over the subalgebra generated by boundary blocks, on the r^2 entries of g_{0..n}."""
    rb = cached_rb(n, r)
    pres = rb.presentation
    full = rb.label(tuple(range(n + 1)))
    new = set(g for row in block(full, n, r) for g in row) if n >= 1 else set()
    boundary = set(pres.generators) - new
    closed = all(pres.differential[g].generators() <= boundary for g in boundary)

    def count(gens):
        out = {}
        for g in sorted(gens, key=lambda g: -g.degree):
            out[g.degree] = out.get(g.degree, 0) + 1
        return out

    new_ok = len(new) == (r * r if n >= 1 else 0) and all(g.degree == 1 - n for g in new)
    return InjectivityReport(n, r, count(pres.generators), count(boundary), count(new),
                             closed, closed and new_ok and boundary.isdisjoint(new))


@dataclass(frozen=True)
class SimplexTangentReport:
    n: int
    r: int
    dims: tuple[int, ...]
    ok: bool

    @property
    def h0(self) -> int:
        return self.dims[0] if self.dims else 0


def simplex_tangent_check(n: int, r: int, point: FlatPoint) -> SimplexTangentReport:
    """Tangent cohomology of RB_n at a flat point: concentrated in degree 0, of dim n r^2."""
    rb = cached_rb(n, r)
    for t, m in point.items():
        if not m.is_invertible():
            raise InvalidPointError(f"g{rb.label(t)} is not invertible")
    if not is_flat_point(point, n):
        raise InvalidPointError("point is not flat")
    values = point_values(rb, point)
    check_point(rb.presentation, values)
    if n == 0:
        return SimplexTangentReport(n, r, (0,), True)
    dims = tuple(cohomology(linearize_at_point(rb.presentation, values)).vector())
    ok = all(d == 0 for d in dims[1:]) and dims[0] == n * r * r
    return SimplexTangentReport(n, r, dims, ok)


@dataclass(frozen=True)
class ResolutionCheckReport:
    n: int
    r: int
    d_squared: bool
    faces_commute: bool
    face_identities: bool
    degeneracies_commute: bool
    degeneracy_identities: bool
    gauge_commutes: bool
    gauge_composition: bool
    injectivity: bool
    tangent: bool
    tangent_dims: tuple
    generators_by_degree: dict

    @property
    def ok(self) -> bool:
        return all([self.d_squared, self.faces_commute, self.face_identities,
                    self.degeneracies_commute, self.degeneracy_identities,
                    self.gauge_commutes, self.gauge_composition, self.injectivity, self.tangent])


def check_face_identities(n: int, r: int) -> bool:
    """d_i d_j = d_{j-1} d_i (i < j) on RB_n -> RB_{n-2}, as pullbacks."""
    if n < 2:
        return True
    top, mid = cached_rb(n, r), cached_rb(n - 1, r)
    for j in range(1, n + 1):
        for i in range(j):
            lhs = compose(face_map(top, j), face_map(mid, i))
            rhs = compose(face_map(top, i), face_map(mid, j - 1))
            if not lhs.same_as(rhs):
                return False
    return True


def check_degeneracy_identities(n: int, r: int) -> bool:
    """Identities involving degeneracies at level n, as pullbacks.

    A composite of scheme maps ``a b`` pulls back to ``b^* o a^*``, so each
    identity is compared in reversed order.
    """
    rb = cached_rb(n, r)
    up = cached_rb(n + 1, r)
    # s_i s_j = s_{j+1} s_i, i <= j
    for j in range(n + 1):
        for i in range(j + 1):
            lhs = compose(degeneracy_map(rb, j), degeneracy_map(up, i))
            rhs = compose(degeneracy_map(rb, i), degeneracy_map(up, j + 1))
            if not lhs.same_as(rhs):
                return False
    ident = identity_morphism(rb.presentation)
    for j in range(n + 1):
        for i in range(n + 2):
            lhs = compose(degeneracy_map(rb, j), face_map(up, i))
            if i < j:
                # d_i s_j = s_{j-1} d_i
                rhs = compose(face_map(rb, i), degeneracy_map(cached_rb(n - 1, r), j - 1))
            elif i in (j, j + 1):
                rhs = ident
            else:
                # d_i s_j = s_j d_{i-1}
                rhs = compose(face_map(rb, i - 1), degeneracy_map(cached_rb(n - 1, r), j))
            if not lhs.same_as(rhs):
                return False
    return True


def run_resolution_checks(n: int, r: int, seed: int = 0, samples: int = 5) -> ResolutionCheckReport:
    rng = random.Random(seed)
    rb = cached_rb(n, r)
    d2 = check_d_squared(rb.presentation).ok
    faces = all(face_map(rb, i).commutes_with_d() is None for i in range(n + 1)) if n >= 1 else True
    degens = all(degeneracy_map(rb, j).commutes_with_d() is None for j in range(n + 1))
    face_ids = check_face_identities(n, r)
    degen_ids = check_degeneracy_identities(n, r)
    g = [random_invertible(r, rng) for _ in range(n + 1)]
    h = [random_invertible(r, rng) for _ in range(n + 1)]
    gauge_d = gauge_transform(rb, g).commutes_with_d() is None
    hg = [a @ b for a, b in zip(h, g)]
    gauge_comp = compose(gauge_transform(rb, g), gauge_transform(rb, h)).same_as(gauge_transform(rb, hg))
    inj = injectivity_skeleton_check(n, r).ok if n >= 1 else True
    tangent_ok = True
    dims = ()
    for _ in range(samples if n >= 1 else 0):
        rep = simplex_tangent_check(n, r, random_flat_point(n, r, rng))
        tangent_ok = tangent_ok and rep.ok
        dims = rep.dims
    return ResolutionCheckReport(n, r, d2, faces, face_ids, degens, degen_ids, gauge_d, gauge_comp,
                                 inj, tangent_ok, dims, rb.presentation.counts_by_degree())
