"""
Acceptance battery. Each criterion returns a CriterionResult; nothing here
raises on a failed check, failures are reported with a short detail string.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .dgalg import Polynomial, check_d_squared, check_point, taylor_component
from .errors import InvalidPointError, NonFlatError
from .exactlin import Matrix, rank
from .moduli import (
    Connection,
    bracket_on_tangent,
    check_flat,
    connection_to_point,
    deformation_complex,
    gauge_apply,
    point_to_connection,
    random_flat_connection,
    random_gauge_family,
    restricted_deformation_complex,
    tangent_cohomology,
    triangulation_invariance,
    trivial_connection,
    build_hom_presentation,
)
from .rbg import (
    build_rb,
    cached_rb,
    check_degeneracy_identities,
    check_face_identities,
    compose,
    degeneracy_map,
    face_map,
    gauge_transform,
    random_flat_point,
    random_invertible,
    simplex_tangent_check,
)
from .scomplex import (
    SemiSimplicialSet,
    boundary_simplex,
    circle,
    sphere,
    standard_simplex,
    torus,
    untwisted_cohomology,
    wedge_of_circles,
)


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self, timing: bool = True) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = f"[{status}] {self.number:>2}. {self.name}: {self.detail}"
        return text + f" ({self.seconds:.2f}s)" if timing else text

    def to_dict(self) -> dict:
        return {"number": self.number, "name": self.name, "passed": self.passed, "detail": self.detail}


# -- fixtures ------------------------------------------------------------------

def trivial_fixtures() -> list[tuple[SemiSimplicialSet, int]]:
    """Pointed spaces and ranks checked at the trivial connection."""
    out = [(torus(), 2), (torus(), 1), (sphere(), 2), (sphere(), 1)]
    out += [(wedge_of_circles(g), r) for g in (1, 2, 3) for r in (1, 2, 3)]
    out += [(circle(1), r) for r in (1, 2, 3)]
    return out


def sampled_fixtures() -> list[SemiSimplicialSet]:
    return [torus(), sphere(), circle(1), circle(3), wedge_of_circles(2),
            standard_simplex(2), standard_simplex(3), boundary_simplex(4)]


def diagonal_torus_connection() -> Connection:
    a = Matrix.diagonal([1, 2])
    b = Matrix.diagonal([3, 1])
    return Connection(2, {"a": a, "b": b, "c": b @ a})


def weight_block_oracle(space: SemiSimplicialSet, diagonals: dict[str, list]) -> tuple[int, ...]:
    """Restricted tangent dims at a diagonal connection, one weight block (i, j) at a time.

    On the (i, j) matrix unit the connection acts through the scalars
    lambda_i, lambda_j; the linearized flatness map on a 2-simplex s is
    phi(d_0 s) lambda_j(d_2 s) + lambda_i(d_0 s) phi(d_2 s) - phi(d_1 s).
    """
    if space.dim > 2:
        raise ValueError("oracle only covers spaces of dimension <= 2")
    r = len(next(iter(diagonals.values())))
    edges = space.simplices_of(1)
    tris = space.simplices_of(2)
    verts = [v for v in space.simplices_of(0) if v.id != space.basepoint]
    col = {e: k for k, e in enumerate(edges)}
    h0 = h1 = 0
    for i in range(r):
        for j in range(r):
            lam = lambda e, k: Fraction(diagonals[e.id][k])
            d1 = [[Fraction(0)] * len(edges) for _ in tris]
            for row, s in zip(d1, tris):
                f0, f1, f2 = (space.face(s, k) for k in range(3))
                row[col[f0]] += lam(f2, j)
                row[col[f2]] += lam(f0, i)
                row[col[f1]] -= 1
            d0 = [[Fraction(0)] * len(verts) for _ in edges]
            for k, v in enumerate(verts):
                for e in edges:
                    if space.target(e) == v:
                        d0[col[e]][k] += lam(e, j)
                    if space.source(e) == v:
                        d0[col[e]][k] -= lam(e, i)
            r1 = rank(Matrix(len(tris), len(edges), d1)) if tris else 0
            r0 = rank(Matrix(len(edges), len(verts), d0)) if verts else 0
            h0 += len(edges) - r1 - r0
            h1 += len(tris) - r1
    return (h0, h1) if space.dim == 2 else (h0,)


# -- criteria ------------------------------------------------------------------

def criterion_1(seed: int) -> tuple[bool, str]:
    bad = [(n, r) for n in range(5) for r in (1, 2) if not check_d_squared(build_rb(n, r).presentation).ok]
    verbatim = True
    for r in (1, 2):
        rb = build_rb(2, r)
        g12, g01, g02 = rb.poly_block((1, 2)), rb.poly_block((0, 1)), rb.poly_block((0, 2))
        for a, row in enumerate(rb.block((0, 1, 2))):
            for b, g in enumerate(row):
                expected = sum((g12[a][c] * g01[c][b] for c in range(r)), Polynomial()) - g02[a][b]
                verbatim = verbatim and rb.presentation.differential[g] == expected
    ok = not bad and verbatim
    return ok, f"d^2=0 on {10 - len(bad)}/10 presentations (n<=4, r<=2); d(g012) verbatim: {verbatim}"


def criterion_2(seed: int) -> tuple[bool, str]:
    failures = []
    for n in range(4):
        for r in (1, 2):
            rb = cached_rb(n, r)
            if n >= 1 and any(face_map(rb, i).commutes_with_d() is not None for i in range(n + 1)):
                failures.append(f"faces/d n={n} r={r}")
            if any(degeneracy_map(rb, j).commutes_with_d() is not None for j in range(n + 1)):
                failures.append(f"degeneracies/d n={n} r={r}")
            if not check_face_identities(n, r):
                failures.append(f"face identities n={n} r={r}")
            if not check_degeneracy_identities(n, r):
                failures.append(f"degeneracy identities n={n} r={r}")
    return not failures, "all identities hold for n<=3, r<=2" if not failures else "; ".join(failures)


def criterion_3(seed: int) -> tuple[bool, str]:
    rng = random.Random(seed)
    failures = []
    count = 0
    for n in (2, 3, 4):
        for r in (1, 2):
            for _ in range(25):
                rep = simplex_tangent_check(n, r, random_flat_point(n, r, rng))
                count += 1
                if not rep.ok:
                    failures.append(f"n={n} r={r} dims={rep.dims}")
    return not failures, f"{count - len(failures)}/{count} flat points have H^0 = n r^2, H^>=1 = 0"


def _expected_trivial(space: SemiSimplicialSet, r: int) -> tuple[int, ...]:
    betti = untwisted_cohomology(space)
    return tuple(r * r * b for b in betti[1:]) or (0,)


def criterion_4(seed: int) -> tuple[bool, str]:
    failures = []
    for space, r in trivial_fixtures():
        got = tangent_cohomology(space, trivial_connection(space, r)).dims
        if got != _expected_trivial(space, r):
            failures.append(f"{space.name} r={r}: {got} != {_expected_trivial(space, r)}")
    named = {("torus", 2): (8, 4), ("sphere", 2): (0, 4)}
    for (name, r), want in named.items():
        space = torus() if name == "torus" else sphere()
        got = tangent_cohomology(space, trivial_connection(space, r)).dims
        if got != want:
            failures.append(f"{name} r={r}: {got} != {want}")
    n = len(trivial_fixtures()) + len(named)
    return not failures, f"{n - len(failures)}/{n} fixtures match r^2 x Betti" if not failures else "; ".join(failures)


def criterion_5(seed: int) -> tuple[bool, str]:
    space = torus()
    conn = diagonal_torus_connection()
    diag = {e: [conn[e][k, k] for k in range(2)] for e in conn.edges}
    want = weight_block_oracle(space, diag)
    got = tangent_cohomology(space, conn).dims
    rng = random.Random(seed)
    conj = [tangent_cohomology(space, gauge_apply(space, random_gauge_family(space, 2, rng, False), conn)).dims
            for _ in range(5)]
    ok = got == want and all(c == want for c in conj)
    return ok, f"engine {got}, weight-block oracle {want}, conjugates {sorted(set(conj))}"


def criterion_6(seed: int) -> tuple[bool, str]:
    rng = random.Random(seed)
    failures = []
    c1, c3 = circle(1), circle(3)
    for r in (1, 2):
        for _ in range(5):
            h = random_invertible(r, rng)
            one = Connection(r, {"e0": h})
            ident = Matrix.identity(r)
            three = Connection(r, {"e0": h, "e1": ident, "e2": ident})
            rep = triangulation_invariance(c1, one, c3, three)
            if not rep.equal or rep.first != (r * r,):
                failures.append(f"circle r={r}: {rep.first} vs {rep.second}")
    d0, d2 = standard_simplex(0), standard_simplex(2)
    for r in (1, 2):
        for _ in range(5):
            conn = random_flat_connection(d2, r, rng)
            rep = triangulation_invariance(d2, conn, d0, trivial_connection(d0, r))
            if not rep.equal or any(rep.first):
                failures.append(f"simplex r={r}: {rep.first} vs {rep.second}")
    t = torus()
    for _ in range(3):
        conn = random_flat_connection(t, 2, rng)
        moved = gauge_apply(t, random_gauge_family(t, 2, rng, False), conn)
        rep = triangulation_invariance(t, conn, t, moved)
        if not rep.equal:
            failures.append(f"torus gauge: {rep.first} vs {rep.second}")
    return not failures, "all paired dimension vectors agree" if not failures else "; ".join(failures)


def criterion_7(seed: int) -> tuple[bool, str]:
    rng = random.Random(seed)
    failures = []
    cases = [(torus(), trivial_connection(torus(), 2)), (torus(), diagonal_torus_connection()),
             (sphere(), trivial_connection(sphere(), 2))]
    cases += [(s, random_flat_connection(s, 2, rng)) for s in (torus(), sphere())]
    for space, conn in cases:
        base = tangent_cohomology(space, conn, pre_quotient=True)
        for _ in range(10):
            moved = gauge_apply(space, random_gauge_family(space, 2, rng, True), conn)
            rep = tangent_cohomology(space, moved, pre_quotient=True)
            if (rep.dims, rep.pre_quotient_dims) != (base.dims, base.pre_quotient_dims):
                failures.append(f"{space.name}: {base.dims} -> {rep.dims}")
            free = gauge_apply(space, random_gauge_family(space, 2, rng, False), conn)
            pre = tangent_cohomology(space, free, pre_quotient=True).pre_quotient_dims
            if pre != base.pre_quotient_dims:
                failures.append(f"{space.name} pre-quotient: {base.pre_quotient_dims} -> {pre}")
    for r in (1, 2):
        rb = cached_rb(2, r)
        for _ in range(3):
            g = [random_invertible(r, rng) for _ in range(3)]
            h = [random_invertible(r, rng) for _ in range(3)]
            lhs = compose(gauge_transform(rb, g), gauge_transform(rb, h))
            if not lhs.same_as(gauge_transform(rb, [b @ a for a, b in zip(g, h)])):
                failures.append(f"composition law RB_2 r={r}")
            if gauge_transform(rb, g).commutes_with_d() is not None:
                failures.append(f"gauge/d RB_2 r={r}")
    n = len(cases) * 10
    return not failures, f"{n} gauge families per quotient type leave dims fixed; composition law holds" \
        if not failures else "; ".join(failures[:5])


def criterion_8(seed: int) -> tuple[bool, str]:
    failures = []
    for space, r in trivial_fixtures():
        conn = trivial_connection(space, r)
        cx = restricted_deformation_complex(space, conn)
        for d in cx.degrees:
            if not (cx.differential(d + 1) @ cx.differential(d)).is_zero():
                failures.append(f"{space.name} r={r}: lambda1^2 != 0")
        table = bracket_on_tangent(space, conn)
        if not table.antisymmetric():
            failures.append(f"{space.name} r={r}: antisymmetry")
        if not table.jacobi():
            failures.append(f"{space.name} r={r}: Jacobi")
        pres = build_hom_presentation(space, r)
        if not taylor_component(pres, connection_to_point(space, conn), 3).is_zero():
            failures.append(f"{space.name} r={r}: lambda3 != 0")
    n = len(trivial_fixtures())
    return not failures, f"{n} fixtures: lambda1^2 = 0, antisymmetry, Jacobi, lambda3 = 0" \
        if not failures else "; ".join(failures)


def _perturb(conn: Connection, edge: str, rng: random.Random) -> Connection:
    r = conn.r
    while True:
        a, b = rng.randrange(r), rng.randrange(r)
        delta = Matrix(r, r, [[int(i == a and j == b) * rng.choice((-1, 1)) for j in range(r)]
                              for i in range(r)])
        m = conn[edge] + delta
        if m.is_invertible():
            edges = dict(conn.edges)
            edges[edge] = m
            return Connection(r, edges)


def criterion_9(seed: int, samples: int = 50) -> tuple[bool, str]:
    rng = random.Random(seed)
    failures = []
    trips = rejected = 0
    for space in sampled_fixtures():
        pres = build_hom_presentation(space, 2)
        tris = space.simplices_of(2)
        for _ in range(samples):
            conn = random_flat_connection(space, 2, rng)
            point = connection_to_point(space, conn)
            try:
                check_point(pres, point)
            except InvalidPointError as exc:
                failures.append(f"{space.name}: flat point rejected ({exc})")
            if point_to_connection(space, point, 2) != conn:
                failures.append(f"{space.name}: round trip changed the connection")
            trips += 1
            if not tris:
                continue
            edge = rng.choice(space.simplices_of(1)).id
            bad = _perturb(conn, edge, rng)
            report = check_flat(space, bad)
            if report.ok:
                continue  # the perturbation happened to stay flat
            expected = next(s for s in tris if s.id in report.residual.values)
            try:
                check_point(pres, connection_to_point(space, bad))
                failures.append(f"{space.name}: non-flat point accepted")
            except InvalidPointError:
                pass
            try:
                deformation_complex(space, bad)
                failures.append(f"{space.name}: non-flat connection accepted")
            except NonFlatError as exc:
                if exc.simplex != expected or edge not in {f.id for f in space.faces[exc.simplex]}:
                    failures.append(f"{space.name}: wrong simplex named")
            rejected += 1
    return not failures, f"{trips} round trips, {rejected} perturbations rejected with a named 2-simplex" \
        if not failures else "; ".join(failures[:5])


def criterion_10(seed: int, samples: int = 10) -> tuple[bool, str]:
    rng = random.Random(seed)
    failures = []
    checked = 0
    spaces = sampled_fixtures() + [space for space, _ in trivial_fixtures()]
    for space in spaces:
        for r in (1, 2):
            conns = [trivial_connection(space, r)] + [random_flat_connection(space, r, rng) for _ in range(samples)]
            for v in space.simplices_of(0):
                for conn in conns:
                    cx = restricted_deformation_complex(space, conn, v.id)
                    g = cx.differential(-1)
                    checked += 1
                    if rank(g) != g.cols:
                        failures.append(f"{space.name} r={r} basepoint {v.id}")
    return not failures, f"ker(C^0_res -> C^1) = 0 on {checked} pointed flat connections" \
        if not failures else "; ".join(failures[:5])


CRITERIA: list[tuple[int, str, Callable[[int], tuple[bool, str]]]] = [
    (1, "resolution soundness", criterion_1),
    (2, "simplicial structure", criterion_2),
    (3, "tangent of RB_n at flat points", criterion_3),
    (4, "tangent cohomology at trivial connections", criterion_4),
    (5, "tangent cohomology at a diagonal torus connection", criterion_5),
    (6, "triangulation invariance", criterion_6),
    (7, "gauge coherence", criterion_7),
    (8, "bracket laws", criterion_8),
    (9, "functor-of-points round trip", criterion_9),
    (10, "linearized freeness", criterion_10),
]


def run_criterion(number: int, seed: int = 0) -> CriterionResult:
    for num, name, fn in CRITERIA:
        if num == number:
            start = time.perf_counter()
            try:
                passed, detail = fn(seed)
            except Exception as exc:  # a crash is a failed criterion, not a crashed battery
                passed, detail = False, f"{type(exc).__name__}: {exc}"
            return CriterionResult(num, name, passed, detail, time.perf_counter() - start)
    raise KeyError(f"no criterion {number}")


def run_suite(seed: int = 0, only: list[int] | None = None) -> list[CriterionResult]:
    return [run_criterion(num, seed) for num, _, _ in CRITERIA if only is None or num in only]
