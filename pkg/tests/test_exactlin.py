from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from dermod.errors import NotAComplexError, ParseError
from dermod.exactlin import (
    Matrix,
    RationalComplex,
    cohomology,
    format_rational,
    image_basis,
    kernel_basis,
    parse_rational,
    rank,
    rref,
    solve,
)
from dermod.scomplex import coboundary_matrix, torus


def matrices(max_rows=5, max_cols=5, bound=4):
    return st.integers(0, max_rows).flatmap(
        lambda m: st.integers(0, max_cols).flatmap(
            lambda n: st.lists(st.lists(st.integers(-bound, bound), min_size=n, max_size=n),
                               min_size=m, max_size=m).map(lambda rows: Matrix(m, n, rows))))


def square(max_n=4, bound=4):
    return st.integers(1, max_n).flatmap(
        lambda n: st.lists(st.lists(st.integers(-bound, bound), min_size=n, max_size=n),
                           min_size=n, max_size=n).map(lambda rows: Matrix(n, n, rows)))


def test_rational_text_round_trip():
    assert parse_rational("-3/6") == Fraction(-1, 2)
    assert parse_rational("+7") == 7
    assert format_rational(Fraction(4, 2)) == "2"
    assert format_rational(Fraction(-1, 3)) == "-1/3"
    for bad in ("1/0", "1.5", "", "a", "1/-2"):
        with pytest.raises(ParseError):
            parse_rational(bad)


def test_small_rank_examples():
    assert rank(Matrix.identity(3)) == 3
    assert kernel_basis(Matrix.identity(3)) == []
    assert rank(Matrix.zeros(2, 5)) == 0
    assert len(kernel_basis(Matrix.zeros(2, 5))) == 5
    m = Matrix.from_rows([[1, 2], [2, 4]])
    assert rank(m) == 1
    (k,) = kernel_basis(m)
    assert k[0] == -2 * k[1] and k[1] != 0


def test_empty_shapes():
    assert rank(Matrix(0, 3)) == 0
    assert len(kernel_basis(Matrix(0, 3))) == 3
    assert rank(Matrix(3, 0)) == 0
    assert kernel_basis(Matrix(3, 0)) == []


@given(matrices())
def test_rank_agrees_with_sympy(m):
    expected = sp.Matrix(m.to_rows()).rank() if m.rows and m.cols else 0
    assert rank(m) == expected


@given(matrices())
def test_kernel_and_image_bases(m):
    ker = kernel_basis(m)
    assert len(ker) == m.cols - rank(m)
    for v in ker:
        assert not any(m.apply(v))
    if ker:
        assert rank(Matrix.from_columns(ker, m.cols)) == len(ker)
    img = image_basis(m)
    assert len(img) == rank(m)
    if img:
        assert rank(Matrix.from_columns(img + [m.column(j) for j in range(m.cols)], m.rows)) == len(img)


@given(matrices())
def test_rank_invariant_under_transpose(m):
    assert rank(m) == rank(m.transpose())


@given(matrices(), st.lists(st.integers(-3, 3), min_size=5, max_size=5))
def test_solve_recovers_a_consistent_right_hand_side(m, x):
    x = x[:m.cols]
    b = m.apply(x)
    y = solve(m, b)
    assert y is not None and m.apply(y) == b


def test_solve_reports_inconsistency():
    assert solve(Matrix.from_rows([[1, 1], [1, 1]]), [1, 2]) is None


@given(square())
def test_determinant_and_inverse(m):
    assert m.determinant() == sp.Matrix(m.to_rows()).det()
    if m.is_invertible():
        assert m @ m.inverse() == Matrix.identity(m.rows)
    else:
        with pytest.raises(ValueError):
            m.inverse()


@given(matrices())
def test_rref_pivots_match_rank(m):
    rows, pivots = rref(m)
    assert len(pivots) == rank(m)
    for i, p in enumerate(pivots):
        assert rows[i][p] == 1


def test_two_term_complexes():
    zero = RationalComplex(0, (1, 1), (Matrix.zeros(1, 1),))
    assert cohomology(zero).vector() == [1, 1]
    iso = RationalComplex(0, (1, 1), (Matrix.identity(1),))
    assert cohomology(iso).vector() == [0, 0]


def test_untwisted_torus_complex():
    t = torus()
    cx = RationalComplex(0, (1, 3, 2), (coboundary_matrix(t, 0), coboundary_matrix(t, 1)))
    assert [rank(d) for d in cx.differentials] == [0, 1]
    assert cohomology(cx).vector() == [1, 2, 1]


def test_non_complexes_are_rejected():
    with pytest.raises(NotAComplexError):
        RationalComplex(0, (1, 2), (Matrix.zeros(1, 1),))
    bad = RationalComplex(0, (1, 1, 1), (Matrix.identity(1), Matrix.identity(1)))
    with pytest.raises(NotAComplexError):
        cohomology(bad)


@st.composite
def complexes(draw):
    """Random three-term complexes: d1 factors through the cokernel of d0."""
    a = draw(matrices(4, 4, 3))
    n0, n1 = a.cols, a.rows
    left = kernel_basis(a.transpose())  # rows annihilating the image of a
    k = draw(st.integers(0, 3))
    coeffs = draw(st.lists(st.lists(st.integers(-2, 2), min_size=len(left), max_size=len(left)),
                           min_size=k, max_size=k))
    rows = [[sum(c * v[j] for c, v in zip(cs, left)) for j in range(n1)] for cs in coeffs]
    return RationalComplex(-1, (n0, n1, k), (a, Matrix(k, n1, rows)))


@given(complexes())
def test_euler_characteristic_matches_cohomology(cx):
    h = cohomology(cx)
    assert cx.euler_characteristic() == sum((-1) ** d * h.dim(d) for d in cx.degrees)


@given(complexes())
def test_representatives_are_independent_cocycles(cx):
    h = cohomology(cx, bases=True)
    for d in cx.degrees:
        reps = h.representatives[d]
        assert len(reps) == h.dim(d) == cohomology(cx).dim(d)
        for i, z in enumerate(reps):
            assert not any(cx.differential(d).apply(z))
            coords = h.coordinates(d, z)
            assert coords == tuple(Fraction(int(j == i)) for j in range(len(reps)))
