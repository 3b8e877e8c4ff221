"""
Finite semi-simplicial sets (Delta-complexes).

A space is a table of simplices per dimension together with explicit face
tables ``faces[sigma] = (d_0 sigma, ..., d_p sigma)``. There are no
degeneracies. Face tables are data rather than vertex lists, so a simplex
may repeat a vertex (``circle(1)``, ``torus()``).

Space file grammar (one record per line, ``#`` starts a comment)::

    space <name>
    simplex <id> <dim> [<face_0> ... <face_dim>]
    basepoint <vertex-id>

Vertices (dim 0) list no faces; a simplex of dimension p >= 1 lists exactly
p + 1 face ids, ``d_0`` first. Ids are whitespace-free tokens, unique within
their dimension. Records may appear in any order.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from itertools import combinations
from types import MappingProxyType
from typing import Mapping, NamedTuple

from .errors import InvalidSpaceError, ParseError
from .exactlin import Matrix, rank


class SimplexRef(NamedTuple):
    id: str
    dim: int

    def __str__(self):
        return self.id


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    message: str = ""
    simplex: SimplexRef | None = None

    def __bool__(self):
        return self.ok


@dataclass(frozen=True)
class SemiSimplicialSet:
    name: str
    simplices: tuple[tuple[str, ...], ...]
    faces: Mapping[SimplexRef, tuple[SimplexRef, ...]] = field(hash=False)
    basepoint: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "faces", MappingProxyType(dict(self.faces)))

    @classmethod
    def from_table(cls, name, table, basepoint=None):
        """Build from ``{dim: {id: [face ids]}}``; face ids are resolved one dimension down."""
        top = max(table) if table else -1
        simplices = tuple(tuple(table.get(p, {})) for p in range(top + 1))
        faces = {}
        for p, entries in table.items():
            for sid, face_ids in entries.items():
                faces[SimplexRef(sid, p)] = tuple(SimplexRef(f, p - 1) for f in face_ids)
        return cls(name, simplices, faces, basepoint)

    @property
    def dim(self) -> int:
        return len(self.simplices) - 1

    def simplices_of(self, p: int) -> list[SimplexRef]:
        if p < 0 or p > self.dim:
            return []
        return [SimplexRef(s, p) for s in self.simplices[p]]

    def all_simplices(self) -> list[SimplexRef]:
        return [s for p in range(self.dim + 1) for s in self.simplices_of(p)]

    def count(self, p: int) -> int:
        return len(self.simplices[p]) if 0 <= p <= self.dim else 0

    def counts(self) -> list[int]:
        return [self.count(p) for p in range(self.dim + 1)]

    def euler_characteristic(self) -> int:
        return sum((-1) ** p * n for p, n in enumerate(self.counts()))

    def ref(self, sid: str, dim: int) -> SimplexRef:
        s = SimplexRef(sid, dim)
        if dim > self.dim or sid not in self.simplices[dim]:
            raise KeyError(f"no {dim}-simplex named {sid!r} in {self.name}")
        return s

    def vertex(self, sid: str) -> SimplexRef:
        return self.ref(sid, 0)

    def face(self, sigma: SimplexRef, i: int) -> SimplexRef:
        if not 0 <= i <= sigma.dim:
            raise IndexError(f"face index {i} out of range for {sigma.dim}-simplex {sigma.id}")
        return self.faces[sigma][i]

    def source(self, edge: SimplexRef) -> SimplexRef:
        """Edges run from d_1 e to d_0 e."""
        return self.face(edge, 1)

    def target(self, edge: SimplexRef) -> SimplexRef:
        return self.face(edge, 0)

    def with_basepoint(self, basepoint: str | None) -> "SemiSimplicialSet":
        return SemiSimplicialSet(self.name, self.simplices, self.faces, basepoint)

    def require_basepoint(self) -> SimplexRef:
        if self.basepoint is None:
            raise InvalidSpaceError(f"space {self.name} has no basepoint")
        return self.vertex(self.basepoint)

    def is_connected(self) -> bool:
        verts = [v.id for v in self.simplices_of(0)]
        if not verts:
            return False
        adj = defaultdict(set)
        for e in self.simplices_of(1):
            u, v = self.source(e).id, self.target(e).id
            adj[u].add(v)
            adj[v].add(u)
        seen = {verts[0]}
        stack = [verts[0]]
        while stack:
            u = stack.pop()
            for v in adj[u] - seen:
                seen.add(v)
                stack.append(v)
        return len(seen) == len(verts)


def validate(space: SemiSimplicialSet) -> ValidationReport:
    """Check face tables, the simplicial identities and basepoint connectivity."""
    for p in range(space.dim + 1):
        ids = space.simplices[p]
        if len(set(ids)) != len(ids):
            return ValidationReport(False, f"duplicate id among {p}-simplices")
    for p in range(space.dim + 1):
        for sigma in space.simplices_of(p):
            fs = space.faces.get(sigma, ())
            if p == 0:
                if fs:
                    return ValidationReport(False, f"vertex {sigma.id} lists faces", sigma)
                continue
            if len(fs) != p + 1:
                return ValidationReport(
                    False, f"{p}-simplex {sigma.id} has {len(fs)} faces, expected {p + 1}", sigma)
            for i, f in enumerate(fs):
                if f.dim != p - 1 or f.id not in space.simplices[p - 1]:
                    return ValidationReport(
                        False, f"face d_{i} of {sigma.id} refers to missing {p - 1}-simplex {f.id}",
                        sigma)
    for p in range(2, space.dim + 1):
        for sigma in space.simplices_of(p):
            for j in range(1, p + 1):
                for i in range(j):
                    lhs = space.face(space.face(sigma, j), i)
                    rhs = space.face(space.face(sigma, i), j - 1)
                    if lhs != rhs:
                        return ValidationReport(
                            False,
                            f"identity d_{i} d_{j} = d_{j - 1} d_{i} fails on {sigma.id}: "
                            f"{lhs.id} != {rhs.id}",
                            sigma)
    if space.basepoint is not None:
        if space.dim < 0 or space.basepoint not in space.simplices[0]:
            return ValidationReport(False, f"basepoint {space.basepoint} is not a vertex")
        if not space.is_connected():
            return ValidationReport(False, "basepoint given but the 1-skeleton is disconnected")
    return ValidationReport(True)


def ensure_valid(space: SemiSimplicialSet) -> None:
    report = validate(space)
    if not report.ok:
        raise InvalidSpaceError(f"{space.name}: {report.message}")


def front_face(space: SemiSimplicialSet, sigma: SimplexRef, nu: int) -> SimplexRef:
    """The nu-face on the first nu + 1 vertices: d_{nu+1} ... d_p sigma."""
    if not 0 <= nu <= sigma.dim:
        raise ValueError(f"front face of dimension {nu} of a {sigma.dim}-simplex")
    s = sigma
    for k in range(sigma.dim, nu, -1):
        s = space.face(s, k)
    return s


def back_face(space: SemiSimplicialSet, sigma: SimplexRef, nu: int) -> SimplexRef:
    """The nu-face on the last nu + 1 vertices: d_0 applied p - nu times."""
    if not 0 <= nu <= sigma.dim:
        raise ValueError(f"back face of dimension {nu} of a {sigma.dim}-simplex")
    s = sigma
    for _ in range(sigma.dim - nu):
        s = space.face(s, 0)
    return s


def vertex_sequence(space: SemiSimplicialSet, sigma: SimplexRef) -> list[SimplexRef]:
    return [back_face(space, front_face(space, sigma, k), 0) for k in range(sigma.dim + 1)]


# -- builders ---------------------------------------------------------------

def _tuple_id(t, n):
    return ("" if n < 10 else ",").join(str(i) for i in t)


def _simplex_table(n: int, top: int) -> dict:
    table = {}
    for p in range(top + 1):
        table[p] = {}
        for t in combinations(range(n + 1), p + 1):
            faces = [_tuple_id(t[:i] + t[i + 1:], n) for i in range(p + 1)] if p else []
            table[p][_tuple_id(t, n)] = faces
    return table


def standard_simplex(n: int) -> SemiSimplicialSet:
    """Delta[n]; the simplex on vertices i_0 < ... < i_p is named by its digits."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return SemiSimplicialSet.from_table(f"simplex({n})", _simplex_table(n, n), "0")


def boundary_simplex(n: int) -> SemiSimplicialSet:
    """The boundary of Delta[n]: every simplex except the top cell."""
    if n < 1:
        raise ValueError("boundary_simplex needs n >= 1")
    return SemiSimplicialSet.from_table(f"boundary({n})", _simplex_table(n, n - 1), "0")


def circle(k: int) -> SemiSimplicialSet:
    """k-gon: vertices v0..v{k-1}, edge e_i from v_i to v_{i+1 mod k}."""
    if k < 1:
        raise ValueError("circle needs at least one edge")
    table = {0: {f"v{i}": [] for i in range(k)},
             1: {f"e{i}": [f"v{(i + 1) % k}", f"v{i}"] for i in range(k)}}
    return SemiSimplicialSet.from_table(f"circle({k})", table, "v0")


def wedge_of_circles(g: int) -> SemiSimplicialSet:
    if g < 1:
        raise ValueError("wedge_of_circles needs g >= 1")
    table = {0: {"v": []}, 1: {f"a{i}": ["v", "v"] for i in range(1, g + 1)}}
    return SemiSimplicialSet.from_table(f"wedge({g})", table, "v")


def torus() -> SemiSimplicialSet:
    """One vertex v, edges a, b, c, triangles L = (b, c, a) and U = (a, c, b)."""
    table = {0: {"v": []},
             1: {"a": ["v", "v"], "b": ["v", "v"], "c": ["v", "v"]},
             2: {"L": ["b", "c", "a"], "U": ["a", "c", "b"]}}
    return SemiSimplicialSet.from_table("torus", table, "v")


def sphere() -> SemiSimplicialSet:
    s = boundary_simplex(3)
    return SemiSimplicialSet("sphere", s.simplices, s.faces, s.basepoint)


BUILTIN_SPACES = {
    "simplex:N": "standard simplex Delta[N]",
    "boundary:N": "boundary of Delta[N] (a (N-1)-sphere)",
    "circle:K": "circle as a K-gon",
    "wedge:G": "wedge of G circles on one vertex",
    "torus": "one-vertex torus with two triangles",
    "sphere": "2-sphere as the boundary of Delta[3]",
}


def builtin_space(text: str) -> SemiSimplicialSet:
    """Resolve ``torus``, ``sphere``, ``simplex:N``, ``boundary:N``, ``circle:K`` or ``wedge:G``."""
    name, _, arg = text.partition(":")
    plain = {"torus": torus, "sphere": sphere}
    indexed = {"simplex": standard_simplex, "boundary": boundary_simplex,
               "circle": circle, "wedge": wedge_of_circles}
    if name in plain and not arg:
        return plain[name]()
    if name in indexed and arg:
        try:
            k = int(arg)
        except ValueError:
            raise ParseError(f"space {text!r}: {arg!r} is not an integer") from None
        try:
            return indexed[name](k)
        except ValueError as exc:
            raise ParseError(f"space {text!r}: {exc}") from None
    raise ParseError(f"unknown built-in space {text!r}")


# -- untwisted cohomology ---------------------------------------------------

def coboundary_matrix(space: SemiSimplicialSet, p: int) -> Matrix:
    """Matrix of C^p -> C^{p+1}, (d f)(sigma) = sum_i (-1)^i f(d_i sigma)."""
    rows = space.simplices_of(p + 1)
    cols = {s: j for j, s in enumerate(space.simplices_of(p))}
    data = [[0] * len(cols) for _ in rows]
    for i, sigma in enumerate(rows):
        for k in range(p + 2):
            data[i][cols[space.face(sigma, k)]] += (-1) ** k
    return Matrix(len(rows), len(cols), data)


def untwisted_cohomology(space: SemiSimplicialSet) -> list[int]:
    """Rational Betti numbers b_0, ..., b_dim."""
    ranks = [rank(coboundary_matrix(space, p)) for p in range(space.dim + 1)]
    return [space.count(p) - ranks[p] - (ranks[p - 1] if p else 0)
            for p in range(space.dim + 1)]


# -- file format ------------------------------------------------------------

def parse_space(text: str) -> SemiSimplicialSet:
    name = "space"
    basepoint = None
    table: dict[int, dict[str, list[str]]] = defaultdict(dict)
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        kind = tok[0]
        if kind == "space":
            if len(tok) != 2:
                raise ParseError(f"line {lineno}: expected 'space <name>'")
            name = tok[1]
        elif kind == "basepoint":
            if len(tok) != 2:
                raise ParseError(f"line {lineno}: expected 'basepoint <vertex-id>'")
            basepoint = tok[1]
        elif kind == "simplex":
            if len(tok) < 3:
                raise ParseError(f"line {lineno}: expected 'simplex <id> <dim> faces...'")
            try:
                p = int(tok[2])
            except ValueError:
                raise ParseError(f"line {lineno}: dimension {tok[2]!r} is not an integer") from None
            if p < 0:
                raise ParseError(f"line {lineno}: negative dimension")
            faces = tok[3:]
            if len(faces) != (p + 1 if p else 0):
                raise ParseError(
                    f"line {lineno}: {p}-simplex {tok[1]} needs {p + 1 if p else 0} faces, "
                    f"got {len(faces)}")
            if tok[1] in table[p]:
                raise ParseError(f"line {lineno}: duplicate {p}-simplex {tok[1]}")
            table[p][tok[1]] = faces
        else:
            raise ParseError(f"line {lineno}: unknown record {kind!r}")
    top = max(table) if table else -1
    full = {p: table.get(p, {}) for p in range(top + 1)}
    return SemiSimplicialSet.from_table(name, full, basepoint)


def format_space(space: SemiSimplicialSet) -> str:
    lines = [f"space {space.name}"]
    for sigma in space.all_simplices():
        faces = " ".join(f.id for f in space.faces.get(sigma, ()))
        lines.append(f"simplex {sigma.id} {sigma.dim}" + (f" {faces}" if faces else ""))
    if space.basepoint is not None:
        lines.append(f"basepoint {space.basepoint}")
    return "\n".join(lines) + "\n"
