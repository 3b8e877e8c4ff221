import random
from fractions import Fraction
from math import comb

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dermod.dgalg import DgPresentation, Polynomial, check_d_squared, check_point
from dermod.errors import InvalidPointError
from dermod.exactlin import Matrix
from dermod.rbg import (
    block,
    build_rb,
    cached_rb,
    check_degeneracy_identities,
    check_face_identities,
    compose,
    degeneracy_map,
    evaluate_morphism_on_point,
    face_map,
    flat_point,
    gauge_transform,
    identity_morphism,
    injectivity_skeleton_check,
    is_flat_point,
    matmul,
    point_values,
    random_flat_point,
    random_invertible,
    run_resolution_checks,
    simplex_tangent_check,
)

P = Polynomial.gen


def gen(rb, label):
    return rb.presentation.generator(label)


def test_generator_counts():
    for n in range(5):
        for r in (1, 2, 3):
            pres = cached_rb(n, r).presentation
            assert len(pres.generators) == sum(comb(n + 1, p + 1) * r * r for p in range(1, n + 1))
            for p in range(1, n + 1):
                assert len(pres.of_degree(1 - p)) == comb(n + 1, p + 1) * r * r


@pytest.mark.parametrize("r", [1, 2, 3])
def test_level_one_has_zero_differential(r):
    pres = build_rb(1, r).presentation
    assert [g.label for g in pres.generators] == [f"g01[{a},{b}]" for a in range(1, r + 1)
                                                  for b in range(1, r + 1)]
    assert all(d.is_zero() for d in pres.differential.values())
    assert len(pres.constraints) == 1


@pytest.mark.parametrize("r", [1, 2])
def test_two_simplex_differential_is_the_flatness_relation(r):
    rb = build_rb(2, r)
    g12, g01, g02 = rb.poly_block((1, 2)), rb.poly_block((0, 1)), rb.poly_block((0, 2))
    prod = matmul(g12, g01)
    for a, row in enumerate(rb.block((0, 1, 2))):
        for b, g in enumerate(row):
            assert rb.presentation.differential[g] == prod[a][b] - g02[a][b]


def test_three_simplex_differential():
    rb = build_rb(3, 1)
    g = lambda s: P(gen(rb, f"g{s}[1,1]"))
    expected = -(g("023") - g("123") * g("01")) + (g("013") - g("23") * g("012"))
    assert rb.presentation.differential[gen(rb, "g0123[1,1]")] == expected


@pytest.mark.parametrize("n,r", [(n, r) for n in range(6) for r in (1, 2)])
def test_square_zero(n, r):
    assert check_d_squared(cached_rb(n, r).presentation).ok


def test_product_of_two_odd_blocks_needs_its_sign():
    """Dropping the sign on the product of two odd blocks breaks d^2 = 0 at level 4."""
    rb = build_rb(4, 1)
    pres = rb.presentation
    diff = dict(pres.differential)
    g = lambda s: P(gen(rb, f"g{s}[1,1]"))
    top = gen(rb, "g01234[1,1]")
    # the nu = 2 product term pairs g_{234} and g_{012}, both of degree -1
    diff[top] = diff[top] - 2 * g("234") * g("012")
    broken = DgPresentation(pres.generators, diff, pres.constraints)
    rep = check_d_squared(broken)
    assert not rep.ok and rep.generator == top


def test_face_map_on_generators():
    rb2 = cached_rb(2, 1)
    f1 = face_map(rb2, 1)
    assert f1.images[gen(cached_rb(1, 1), "g01[1,1]")] == P(gen(rb2, "g02[1,1]"))
    f0 = face_map(cached_rb(3, 1), 0)
    assert f0.images[gen(cached_rb(2, 1), "g012[1,1]")] == P(gen(cached_rb(3, 1), "g123[1,1]"))
    assert f1.commutes_with_d() is None


@pytest.mark.parametrize("n,r", [(n, r) for n in range(2, 5) for r in (1, 2)])
def test_face_identities(n, r):
    assert check_face_identities(n, r)
    rb = cached_rb(n, r)
    assert all(face_map(rb, i).commutes_with_d() is None for i in range(n + 1))


def test_degeneracy_collapse_of_an_edge():
    rb1, rb2 = cached_rb(1, 1), cached_rb(2, 1)
    s1 = degeneracy_map(rb1, 1)  # vertices 0, 1, 2 -> 0, 1, 1
    assert s1.images[gen(rb2, "g12[1,1]")] == Polynomial.constant(1)
    assert s1.images[gen(rb2, "g012[1,1]")] == Polynomial()
    assert s1.images[gen(rb2, "g02[1,1]")] == P(gen(rb1, "g01[1,1]"))
    image = s1(rb2.presentation.differential[gen(rb2, "g012[1,1]")])
    assert image == Polynomial()
    assert s1.commutes_with_d() is None


def test_degeneracy_collapse_of_a_higher_block():
    rb2, rb3 = cached_rb(2, 2), cached_rb(3, 2)
    s = degeneracy_map(rb2, 0)
    for row in rb3.block((0, 1, 2, 3)):
        for g in row:
            assert s.images[g] == Polynomial()
            assert s(rb3.presentation.differential[g]) == Polynomial()
    ident = [[s.images[g] for g in row] for row in rb3.block((0, 1))]
    assert ident == [[Polynomial.constant(int(a == b)) for b in range(2)] for a in range(2)]


@pytest.mark.parametrize("n,r", [(n, r) for n in range(4) for r in (1, 2)])
def test_degeneracy_identities(n, r):
    assert check_degeneracy_identities(n, r)
    rb = cached_rb(n, r)
    assert all(degeneracy_map(rb, j).commutes_with_d() is None for j in range(n + 1))


def test_gauge_examples():
    rb = cached_rb(2, 1)
    ident = [Matrix.identity(1)] * 3
    assert gauge_transform(rb, ident).same_as(identity_morphism(rb.presentation))
    family = [Matrix(1, 1, [[k]]) for k in (2, 3, 5)]
    g = gauge_transform(rb, family)
    top = gen(rb, "g012[1,1]")
    assert g.images[top] == Fraction(5, 2) * P(top)
    assert g(rb.presentation.differential[top]) == Fraction(5, 2) * rb.presentation.differential[top]
    with pytest.raises(ValueError):
        gauge_transform(rb, [Matrix(1, 1, [[0]])] * 3)
    with pytest.raises(ValueError):
        gauge_transform(rb, family[:2])


@given(st.integers(0, 10_000))
def test_gauge_is_an_action_commuting_with_d(seed):
    rng = random.Random(seed)
    rb = cached_rb(2, 2)
    g = [random_invertible(2, rng) for _ in range(3)]
    h = [random_invertible(2, rng) for _ in range(3)]
    assert gauge_transform(rb, g).commutes_with_d() is None
    assert compose(gauge_transform(rb, g), gauge_transform(rb, h)).same_as(
        gauge_transform(rb, [b @ a for a, b in zip(g, h)]))


@pytest.mark.parametrize("n", [2, 3])
def test_gauge_commutes_with_faces(n):
    rng = random.Random(n)
    top, low = cached_rb(n, 2), cached_rb(n - 1, 2)
    family = [random_invertible(2, rng) for _ in range(n + 1)]
    for i in range(n + 1):
        lhs = compose(gauge_transform(top, family), face_map(top, i))
        rhs = compose(face_map(top, i), gauge_transform(low, family[:i] + family[i + 1:]))
        assert lhs.same_as(rhs)


def test_face_map_on_points():
    rng = random.Random(4)
    point = random_flat_point(3, 2, rng)
    top, low = cached_rb(3, 2), cached_rb(2, 2)
    values = point_values(top, point)
    for i in range(4):
        pulled = evaluate_morphism_on_point(face_map(top, i), values)
        keep = [k for k in range(4) if k != i]
        restricted = {(a, b): point[(keep[a], keep[b])] for a in range(3) for b in range(a + 1, 3)}
        assert pulled == point_values(low, restricted)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_injectivity_skeleton(n):
    for r in (1, 2):
        rep = injectivity_skeleton_check(n, r)
        assert rep.ok
        assert rep.new_by_degree == {1 - n: r * r}


def test_tangent_at_the_small_flat_point():
    point = flat_point([Matrix(1, 1, [[2]]), Matrix(1, 1, [[3]])])
    assert point[(0, 2)] == Matrix(1, 1, [[6]])
    rep = simplex_tangent_check(2, 1, point)
    assert rep.ok and rep.dims == (2, 0) and rep.h0 == 2


@given(st.integers(1, 4), st.integers(1, 2), st.integers(0, 10_000))
def test_tangent_at_random_flat_points(n, r, seed):
    if n == 4 and r == 2:
        return
    rep = simplex_tangent_check(n, r, random_flat_point(n, r, random.Random(seed)))
    assert rep.ok and rep.h0 == n * r * r and not any(rep.dims[1:])


def test_tangent_rejects_bad_points():
    rng = random.Random(0)
    point = dict(random_flat_point(2, 2, rng))
    point[(0, 2)] = point[(0, 2)] + Matrix.identity(2)
    if point[(0, 2)].is_invertible():
        assert not is_flat_point(point, 2)
        with pytest.raises(InvalidPointError):
            simplex_tangent_check(2, 2, point)
    singular = flat_point([Matrix(1, 1, [[0]]), Matrix(1, 1, [[1]])])
    with pytest.raises(InvalidPointError):
        simplex_tangent_check(2, 1, singular)


@given(st.integers(0, 10_000))
def test_points_of_pi0_are_flat_tuples(seed):
    rng = random.Random(seed)
    rb = cached_rb(3, 1)
    point = random_flat_point(3, 1, rng)
    check_point(rb.presentation, point_values(rb, point))
    edges = {k: random_invertible(1, rng) for k in point}
    values = point_values(rb, edges)
    if is_flat_point(edges, 3):
        check_point(rb.presentation, values)
    else:
        with pytest.raises(InvalidPointError):
            check_point(rb.presentation, values)


@pytest.mark.parametrize("n,r", [(0, 1), (1, 2), (2, 2), (3, 1)])
def test_resolution_check_report(n, r):
    rep = run_resolution_checks(n, r, seed=1, samples=2)
    assert rep.ok


def test_dump_is_stable():
    assert build_rb(2, 1).presentation.dump() == build_rb(2, 1).presentation.dump()
    text = build_rb(2, 1).presentation.dump()
    assert "g012[1,1] [-1]: d = " in text
    assert block("012", 2, 1)[0][0].degree == -1
