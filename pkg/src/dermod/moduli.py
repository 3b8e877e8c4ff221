"""
Flat connections on semi-simplicial sets and the derived moduli of local systems.

A connection assigns an invertible r x r rational matrix to every edge; an
edge e runs from d_1 e to d_0 e. It is flat when

    E(d_0 s) E(d_2 s) = E(d_1 s)

on every 2-simplex s. The derived moduli presentation Hom(S, RBG) has one
r x r block of generators per simplex of dimension p >= 1, in degree 1 - p,
with the differential of RB_n GL(r) transported along iterated faces.

Connection file grammar (one record per line, ``#`` starts a comment)::

    r <rank>
    edge <edge-id> <a_11> <a_12> ... <a_rr>

Entries are row-major rationals written ``p/q`` or ``p``.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import lcm
from typing import Mapping, Sequence

from .dgalg import (
    DgPresentation,
    Generator,
    Polynomial,
    TangentLieStructure,
    determinant,
    linearize_at_point,
)
from .errors import InvalidSpaceError, NonFlatError, ParseError
from .exactlin import (
    Cohomology,
    Matrix,
    RationalComplex,
    cohomology,
    format_rational,
    kernel_basis,
    parse_rational,
)
from .rbg import block, entry_label, graded_product, matsub, poly_block, random_invertible
from .scomplex import (
    SemiSimplicialSet,
    SimplexRef,
    back_face,
    coboundary_matrix,
    ensure_valid,
    front_face,
)


# -- cochains ------------------------------------------------------------------

@dataclass(frozen=True)
class MatrixCochain:
    """A p-cochain of S with values in r x r rational matrices; absent simplices carry 0."""

    space: SemiSimplicialSet = field(compare=False)
    degree: int
    r: int
    values: Mapping[str, Matrix] = field(default_factory=dict)

    def __post_init__(self):
        zero = Matrix.zeros(self.r, self.r)
        object.__setattr__(self, "values",
                           {k: v for k, v in self.values.items() if v != zero})

    def __call__(self, sigma: SimplexRef | str) -> Matrix:
        sid = sigma.id if isinstance(sigma, SimplexRef) else sigma
        return self.values.get(sid, Matrix.zeros(self.r, self.r))

    def __add__(self, other: "MatrixCochain") -> "MatrixCochain":
        self._check(other)
        keys = set(self.values) | set(other.values)
        return MatrixCochain(self.space, self.degree, self.r,
                             {k: self(k) + other(k) for k in keys})

    def __sub__(self, other: "MatrixCochain") -> "MatrixCochain":
        return self + other.scale(-1)

    def scale(self, c) -> "MatrixCochain":
        return MatrixCochain(self.space, self.degree, self.r,
                             {k: v.scale(c) for k, v in self.values.items()})

    def is_zero(self) -> bool:
        return not self.values

    def _check(self, other):
        if self.degree != other.degree or self.r != other.r:
            raise ValueError("cochains of different degree or rank")


def zero_cochain(space: SemiSimplicialSet, degree: int, r: int) -> MatrixCochain:
    return MatrixCochain(space, degree, r, {})


def aw_product(phi: MatrixCochain, psi: MatrixCochain) -> MatrixCochain:
    """(phi . psi)(s) = phi(back p-face of s) psi(front q-face of s)."""
    if phi.r != psi.r:
        raise ValueError("cochains of different rank")
    space = phi.space
    p, q = phi.degree, psi.degree
    values = {}
    for sigma in space.simplices_of(p + q):
        values[sigma.id] = phi(back_face(space, sigma, p)) @ psi(front_face(space, sigma, q))
    return MatrixCochain(space, p + q, phi.r, values)


def aw_commutator(phi: MatrixCochain, psi: MatrixCochain) -> MatrixCochain:
    sign = -1 if (phi.degree * psi.degree) % 2 else 1
    return aw_product(phi, psi) - aw_product(psi, phi).scale(sign)


def coboundary(phi: MatrixCochain) -> MatrixCochain:
    space = phi.space
    p = phi.degree
    values = {}
    for sigma in space.simplices_of(p + 1):
        acc = Matrix.zeros(phi.r, phi.r)
        for nu in range(p + 2):
            term = phi(space.face(sigma, nu))
            acc = acc + term if nu % 2 == 0 else acc - term
        values[sigma.id] = acc
    return MatrixCochain(space, p + 1, phi.r, values)


# -- connections ------------------------------------------------------------------

@dataclass(frozen=True)
class Connection:
    """Matrices on the edges of a space (flat or not)."""

    r: int
    edges: Mapping[str, Matrix]

    def __post_init__(self):
        object.__setattr__(self, "edges", dict(self.edges))
        for e, m in self.edges.items():
            if m.shape != (self.r, self.r):
                raise ValueError(f"edge {e}: expected {self.r}x{self.r} matrix, got {m.shape}")

    def __getitem__(self, edge: SimplexRef | str) -> Matrix:
        return self.edges[edge.id if isinstance(edge, SimplexRef) else edge]

    def as_cochain(self, space: SemiSimplicialSet) -> MatrixCochain:
        return MatrixCochain(space, 1, self.r, self.edges)

    def digest(self) -> str:
        return hashlib.sha256(format_connection(self).encode()).hexdigest()[:16]


# FlatConnection is a Connection that has passed check_flat
FlatConnection = Connection


def trivial_connection(space: SemiSimplicialSet, r: int) -> Connection:
    return Connection(r, {e.id: Matrix.identity(r) for e in space.simplices_of(1)})


def _require_edges(space: SemiSimplicialSet, conn: Connection) -> None:
    for e in space.simplices_of(1):
        if e.id not in conn.edges:
            raise InvalidSpaceError(f"connection has no matrix on edge {e.id}")
        if not conn[e].is_invertible():
            raise NonFlatError(f"matrix on edge {e.id} is not invertible", e)
    extra = set(conn.edges) - {e.id for e in space.simplices_of(1)}
    if extra:
        raise InvalidSpaceError(f"connection names unknown edges {sorted(extra)}")


def mc_residual(space: SemiSimplicialSet, conn: Connection) -> MatrixCochain:
    """residual(s) = E(d_0 s) E(d_2 s) - E(d_1 s) on every 2-simplex."""
    _require_edges(space, conn)
    values = {}
    for s in space.simplices_of(2):
        values[s.id] = conn[space.face(s, 0)] @ conn[space.face(s, 2)] - conn[space.face(s, 1)]
    return MatrixCochain(space, 2, conn.r, values)


@dataclass(frozen=True)
class FlatnessReport:
    ok: bool
    simplex: SimplexRef | None = None
    residual: MatrixCochain | None = None

    def __bool__(self):
        return self.ok


def check_flat(space: SemiSimplicialSet, conn: Connection) -> FlatnessReport:
    residual = mc_residual(space, conn)
    for s in space.simplices_of(2):
        if s.id in residual.values:
            return FlatnessReport(False, s, residual)
    return FlatnessReport(True, None, residual)


def require_flat(space: SemiSimplicialSet, conn: Connection) -> None:
    report = check_flat(space, conn)
    if not report.ok:
        raise NonFlatError(f"connection is not flat on 2-simplex {report.simplex.id}", report.simplex)


def gauge_apply(space: SemiSimplicialSet, family: Mapping[str, Matrix], conn: Connection) -> Connection:
    """E(e) -> h(d_0 e) E(e) h(d_1 e)^{-1}; vertices missing from ``family`` get the identity."""
    ident = Matrix.identity(conn.r)
    for v, h in family.items():
        if not h.is_invertible():
            raise ValueError(f"gauge matrix at vertex {v} is not invertible")
    inv = {v: h.inverse() for v, h in family.items()}
    edges = {}
    for e in space.simplices_of(1):
        u, v = space.source(e).id, space.target(e).id
        edges[e.id] = family.get(v, ident) @ conn[e] @ inv.get(u, ident)
    return Connection(conn.r, edges)


# -- sampling ------------------------------------------------------------------

def _matrix_power(m: Matrix, k: int) -> Matrix:
    base = m if k >= 0 else m.inverse()
    out = Matrix.identity(m.rows)
    for _ in range(abs(k)):
        out = out @ base
    return out


def integer_cocycles(space: SemiSimplicialSet) -> list[dict[str, int]]:
    """A basis of Z^1(S; Q) scaled to integer vectors, keyed by edge id."""
    edges = space.simplices_of(1)
    if space.dim >= 2:
        basis = kernel_basis(coboundary_matrix(space, 1))
    else:
        basis = [tuple(Fraction(int(i == j)) for j in range(len(edges))) for i in range(len(edges))]
    out = []
    for vec in basis:
        den = lcm(*(x.denominator for x in vec)) if vec else 1
        out.append({e.id: int(x * den) for e, x in zip(edges, vec)})
    return out


def random_gauge_family(space: SemiSimplicialSet, r: int, rng: random.Random,
                        fix_basepoint: bool = True) -> dict[str, Matrix]:
    family = {v.id: random_invertible(r, rng) for v in space.simplices_of(0)}
    if fix_basepoint and space.basepoint is not None:
        family[space.basepoint] = Matrix.identity(r)
    return family


def random_flat_connection(space: SemiSimplicialSet, r: int, rng: random.Random) -> Connection:
    """A gauge transform of a flat connection valued in a random commutative subgroup.

    Each integer 1-cocycle z_j gets a matrix M_j from the algebra generated by
    one random matrix, and an edge carries prod_j M_j^{z_j(e)}.
    """
    base = random_invertible(r, rng)
    ident = Matrix.identity(r)
    cocycles = integer_cocycles(space)
    gens = []
    for _ in cocycles:
        while True:
            m = ident.scale(rng.randint(-2, 2)) + base.scale(rng.randint(-1, 1))
            if m.is_invertible():
                gens.append(m)
                break
    edges = {}
    for e in space.simplices_of(1):
        acc = ident
        for z, m in zip(cocycles, gens):
            acc = acc @ _matrix_power(m, z[e.id])
        edges[e.id] = acc
    family = random_gauge_family(space, r, rng, fix_basepoint=False)
    return gauge_apply(space, family, Connection(r, edges))


# -- derived moduli presentation ------------------------------------------------------

@lru_cache(maxsize=64)
def build_hom_presentation(space: SemiSimplicialSet, r: int) -> DgPresentation:
    """Hom(S, RB GL(r)): the resolution differential transported along iterated faces.

    d g_s = sum_{nu=1}^{p-1} (-1)^nu (g_{d_nu s} - g_{back(s, p-nu)} g_{front(s, nu)})
    """
    ensure_valid(space)
    gens = []
    diff = {}
    constraints = []
    for p in range(1, space.dim + 1):
        for sigma in space.simplices_of(p):
            gens.extend(g for row in block(sigma.id, p, r) for g in row)
            if p == 1:
                constraints.append(determinant(poly_block(sigma.id, 1, r)))
                continue
            total = [[Polynomial() for _ in range(r)] for _ in range(r)]
            for nu in range(1, p):
                omit = space.face(sigma, nu)
                back = back_face(space, sigma, p - nu)
                front = front_face(space, sigma, nu)
                term = matsub(poly_block(omit.id, p - 1, r),
                              graded_product(poly_block(back.id, p - nu, r),
                                             poly_block(front.id, nu, r), p - nu, nu))
                sign = -1 if nu % 2 else 1
                total = [[x + sign * y for x, y in zip(rt, rs)] for rt, rs in zip(total, term)]
            for row_g, row_d in zip(block(sigma.id, p, r), total):
                for g, dg in zip(row_g, row_d):
                    diff[g] = dg
    return DgPresentation(tuple(gens), diff, tuple(constraints), name=f"Hom({space.name}, RBGL({r}))")


def connection_to_point(space: SemiSimplicialSet, conn: Connection) -> dict[Generator, Fraction]:
    _require_edges(space, conn)
    values = {}
    for e in space.simplices_of(1):
        m = conn[e]
        for a, row in enumerate(block(e.id, 1, conn.r)):
            for b, g in enumerate(row):
                values[g] = m[a, b]
    return values


def point_to_connection(space: SemiSimplicialSet, point: Mapping[Generator, Fraction], r: int) -> Connection:
    by_label = {g.label: Fraction(v) for g, v in point.items()}
    edges = {}
    for e in space.simplices_of(1):
        edges[e.id] = Matrix(r, r, [[by_label[entry_label(e.id, a, b)] for b in range(r)]
                                    for a in range(r)])
    return Connection(r, edges)


def tangent_vector_to_cochain(space: SemiSimplicialSet, r: int,
                              vec: Mapping[Generator, Fraction], degree: int) -> MatrixCochain:
    """Identify tangent degree k with matrix-valued (k+1)-cochains."""
    values = {}
    for sigma in space.simplices_of(degree):
        blk = block(sigma.id, degree, r)
        values[sigma.id] = Matrix(r, r, [[vec.get(g, 0) for g in row] for row in blk])
    return MatrixCochain(space, degree, r, values)


def cochain_to_tangent_vector(phi: MatrixCochain) -> dict[Generator, Fraction]:
    out = {}
    for sigma in phi.space.simplices_of(phi.degree):
        m = phi(sigma)
        for a, row in enumerate(block(sigma.id, phi.degree, phi.r)):
            for b, g in enumerate(row):
                if m[a, b]:
                    out[g] = m[a, b]
    return out


# -- tangent complexes -------------------------------------------------------------------

def deformation_complex(space: SemiSimplicialSet, conn: Connection) -> RationalComplex:
    """Tangent complex of Hom(S, RBG) at a flat connection (before the gauge quotient)."""
    require_flat(space, conn)
    pres = build_hom_presentation(space, conn.r)
    if not pres.generators:
        return RationalComplex(0, (0,), ())
    return linearize_at_point(pres, connection_to_point(space, conn))


def _basepoint(space: SemiSimplicialSet, basepoint: str | None) -> SimplexRef:
    if basepoint is not None:
        space = space.with_basepoint(basepoint)
    x0 = space.require_basepoint()
    if not space.is_connected():
        raise InvalidSpaceError(f"space {space.name} is not connected")
    return x0


def gauge_differential(space: SemiSimplicialSet, conn: Connection, basepoint: str | None = None) -> Matrix:
    """Linearized action of the restricted gauge group: C^0_res -> T^0.

    xi -> (e -> xi(d_0 e) E(e) - E(e) xi(d_1 e)).
    """
    x0 = _basepoint(space, basepoint if basepoint is not None else space.basepoint)
    r = conn.r
    pres = build_hom_presentation(space, r)
    index = {g: i for i, g in enumerate(pres.of_degree(0))}
    columns = []
    for v in space.simplices_of(0):
        if v == x0:
            continue
        for a in range(r):
            for b in range(r):
                unit = Matrix(r, r, [[int(i == a and j == b) for j in range(r)] for i in range(r)])
                col = [Fraction(0)] * len(index)
                for e in space.simplices_of(1):
                    m = Matrix.zeros(r, r)
                    if space.target(e) == v:
                        m = m + unit @ conn[e]
                    if space.source(e) == v:
                        m = m - conn[e] @ unit
                    for i, row in enumerate(block(e.id, 1, r)):
                        for j, g in enumerate(row):
                            col[index[g]] += m[i, j]
                columns.append(col)
    return Matrix.from_columns(columns, len(index))


def restricted_deformation_complex(space: SemiSimplicialSet, conn: Connection,
                                   basepoint: str | None = None) -> RationalComplex:
    """Tangent complex of the derived moduli space: C^0_res in degree -1, then T^0, T^1, ..."""
    bp = basepoint if basepoint is not None else space.basepoint
    _basepoint(space, bp)
    inner = deformation_complex(space, conn)
    g = gauge_differential(space, conn, bp)
    dims = (g.cols,) + inner.dims
    if g.rows != inner.dims[0]:
        g = Matrix.zeros(inner.dims[0], g.cols)
    return RationalComplex(-1, dims, (g,) + inner.differentials)


@dataclass
class DeformationReport:
    space: str
    basepoint: str | None
    connection: str
    r: int
    dims: tuple[int, ...]
    linearized_free: bool
    euler_consistent: bool
    pre_quotient_dims: tuple[int, ...] | None = None
    representatives: dict | None = None

    def to_dict(self) -> dict:
        out = {
            "space": self.space,
            "basepoint": self.basepoint,
            "connection": self.connection,
            "r": self.r,
            "dims": list(self.dims),
            "linearized_free": self.linearized_free,
            "euler_consistent": self.euler_consistent,
        }
        if self.pre_quotient_dims is not None:
            out["pre_quotient_dims"] = list(self.pre_quotient_dims)
        if self.representatives is not None:
            out["representatives"] = {
                str(k): [[format_rational(x) for x in v] for v in reps]
                for k, reps in self.representatives.items()}
        return out


def tangent_cohomology(space: SemiSimplicialSet, conn: Connection, basepoint: str | None = None,
                       pre_quotient: bool = False, bases: bool = False) -> DeformationReport:
    bp = basepoint if basepoint is not None else space.basepoint
    cx = restricted_deformation_complex(space, conn, bp)
    h = cohomology(cx, bases=bases)
    dims = tuple(h.dim(d) for d in cx.degrees if d >= 0)
    euler_ok = cx.euler_characteristic() == sum(h.dim(d) if d % 2 == 0 else -h.dim(d) for d in cx.degrees)
    pre = None
    if pre_quotient:
        pre = tuple(cohomology(deformation_complex(space, conn)).vector())
    reps = {d: h.representatives[d] for d in cx.degrees if d >= 0} if bases else None
    return DeformationReport(space.name, bp, conn.digest(), conn.r, dims,
                             h.dim(-1) == 0, euler_ok, pre, reps)


# -- bracket ------------------------------------------------------------------------------

@dataclass
class BracketTable:
    """The graded Lie bracket on tangent cohomology, in chosen bases of each H^k.

    ``constants[(a, i, b, j)]`` are the coordinates in H^{a+b+1} of the bracket
    of basis class i of H^a with basis class j of H^b. Tangent degree k has Lie
    degree k + 1.
    """

    dims: dict[int, int]
    constants: dict[tuple[int, int, int, int], tuple]
    structure: TangentLieStructure = field(repr=False)
    cohomology: Cohomology = field(repr=False)

    def bracket(self, a: int, u: Sequence, b: int, v: Sequence) -> tuple:
        c = a + b + 1
        out = [Fraction(0)] * self.dims.get(c, 0)
        for i, x in enumerate(u):
            if not x:
                continue
            for j, y in enumerate(v):
                if not y:
                    continue
                for k, z in enumerate(self.constants.get((a, i, b, j), ())):
                    out[k] += x * y * z
        return tuple(out)

    def is_zero(self) -> bool:
        return all(not any(v) for v in self.constants.values())

    def antisymmetric(self) -> bool:
        for (a, i, b, j), val in self.constants.items():
            sign = -1 if ((a + 1) * (b + 1)) % 2 else 1
            other = self.constants[(b, j, a, i)]
            if tuple(-sign * x for x in other) != val:
                return False
        return True

    def jacobi(self) -> bool:
        degrees = [d for d, n in self.dims.items() if n]
        for a in degrees:
            for b in degrees:
                for c in degrees:
                    if a + b + c + 2 not in self.dims:
                        continue
                    for i in range(self.dims[a]):
                        for j in range(self.dims[b]):
                            for k in range(self.dims[c]):
                                if any(self._jacobiator(a, i, b, j, c, k)):
                                    return False
        return True

    def _jacobiator(self, a, i, b, j, c, k):
        def unit(d, idx):
            return tuple(Fraction(int(t == idx)) for t in range(self.dims[d]))

        la, lb, lc = a + 1, b + 1, c + 1
        x, y, z = unit(a, i), unit(b, j), unit(c, k)
        t1 = self.bracket(a, x, b + c + 1, self.bracket(b, y, c, z))
        t2 = self.bracket(b, y, c + a + 1, self.bracket(c, z, a, x))
        t3 = self.bracket(c, z, a + b + 1, self.bracket(a, x, b, y))
        s1 = -1 if (la * lc) % 2 else 1
        s2 = -1 if (lb * la) % 2 else 1
        s3 = -1 if (lc * lb) % 2 else 1
        return tuple(s1 * p + s2 * q + s3 * w for p, q, w in zip(t1, t2, t3))

    def to_dict(self) -> dict:
        return {
            "dims": {str(k): v for k, v in sorted(self.dims.items())},
            "constants": [
                {"left": [a, i], "right": [b, j], "value": [format_rational(x) for x in val]}
                for (a, i, b, j), val in sorted(self.constants.items()) if any(val)],
        }


def tangent_structure(space: SemiSimplicialSet, conn: Connection) -> TangentLieStructure:
    require_flat(space, conn)
    return TangentLieStructure(build_hom_presentation(space, conn.r), connection_to_point(space, conn))


def bracket_on_tangent(space: SemiSimplicialSet, conn: Connection,
                       basepoint: str | None = None) -> BracketTable:
    bp = basepoint if basepoint is not None else space.basepoint
    cx = restricted_deformation_complex(space, conn, bp)
    h = cohomology(cx, bases=True)
    lie = tangent_structure(space, conn)
    dims = {d: h.dim(d) for d in cx.degrees if d >= 0}
    constants = {}
    for a in dims:
        for b in dims:
            c = a + b + 1
            if c not in dims:
                continue
            for i, u in enumerate(h.representatives[a]):
                x = lie.from_dense(u, a)
                for j, v in enumerate(h.representatives[b]):
                    y = lie.from_dense(v, b)
                    value = lie.to_dense(lie.bracket(x, y), c)
                    constants[(a, i, b, j)] = h.coordinates(c, value)
    return BracketTable(dims, constants, lie, h)


# -- comparison ------------------------------------------------------------------------------

@dataclass(frozen=True)
class InvarianceReport:
    first: tuple[int, ...]
    second: tuple[int, ...]

    @property
    def equal(self) -> bool:
        n = max(len(self.first), len(self.second))
        pad = lambda v: tuple(v) + (0,) * (n - len(v))
        return pad(self.first) == pad(self.second)


def triangulation_invariance(space1: SemiSimplicialSet, conn1: Connection,
                             space2: SemiSimplicialSet, conn2: Connection,
                             basepoint1: str | None = None,
                             basepoint2: str | None = None) -> InvarianceReport:
    """Compare tangent cohomology of two pointed spaces the caller asserts are weakly equivalent."""
    d1 = tangent_cohomology(space1, conn1, basepoint1).dims
    d2 = tangent_cohomology(space2, conn2, basepoint2).dims
    return InvarianceReport(d1, d2)


# -- file format -------------------------------------------------------------------------------

def parse_connection(text: str) -> Connection:
    r = None
    edges = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if tok[0] == "r":
            if len(tok) != 2 or not tok[1].isdigit() or int(tok[1]) < 1:
                raise ParseError(f"line {lineno}: expected 'r <positive rank>'")
            r = int(tok[1])
        elif tok[0] == "edge":
            if r is None:
                raise ParseError(f"line {lineno}: 'r' record must come before edges")
            if len(tok) != 2 + r * r:
                raise ParseError(f"line {lineno}: edge {tok[1] if len(tok) > 1 else '?'} "
                                 f"needs {r * r} entries")
            if tok[1] in edges:
                raise ParseError(f"line {lineno}: duplicate edge {tok[1]}")
            vals = [parse_rational(x) for x in tok[2:]]
            edges[tok[1]] = Matrix(r, r, [vals[i * r:(i + 1) * r] for i in range(r)])
        else:
            raise ParseError(f"line {lineno}: unknown record {tok[0]!r}")
    if r is None:
        raise ParseError("missing 'r' record")
    return Connection(r, edges)


def format_connection(conn: Connection) -> str:
    lines = [f"r {conn.r}"]
    for e in sorted(conn.edges):
        m = conn.edges[e]
        entries = " ".join(format_rational(m[a, b]) for a in range(conn.r) for b in range(conn.r))
        lines.append(f"edge {e} {entries}")
    return "\n".join(lines) + "\n"
