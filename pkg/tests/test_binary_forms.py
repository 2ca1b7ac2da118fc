"""Quadratic and quartic binary forms: brackets, invariants, transvectants."""

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ambitoric.binary_forms import (
    BinaryForm,
    QuadraticForm,
    as_quadratic,
    curvature_bracket,
    curvature_bracket_fn,
    discriminant,
    inner_product,
    poisson_bracket,
    transvectant,
)
from ambitoric.errors import MalformedInputError
from ambitoric.exact_algebra import R

x, y = R.vars("x", "y")
ints = st.integers(-5, 5)
quadratics = st.builds(QuadraticForm, ints, ints, ints)
quartics = st.lists(ints, min_size=5, max_size=5).map(lambda c: BinaryForm(tuple(c), 4))


def test_poisson_bracket_example():
    assert poisson_bracket(QuadraticForm(0, 1, 0), QuadraticForm(1, 0, 0)) == QuadraticForm(-2, 0, 0)


@given(quadratics, quadratics)
def test_poisson_bracket_matches_expansion(q, w):
    qb, wb = q.as_binary_form(), w.as_binary_form()
    direct = qb.derivative() * wb - wb.derivative() * qb
    assert poisson_bracket(q, w).as_binary_form() == direct.with_bound(2)
    assert poisson_bracket(q, q).is_zero()


def test_discriminant_and_inner_product_examples():
    assert discriminant(QuadraticForm(0, 1, 0)) == 1
    assert discriminant(QuadraticForm(1, 0, 1)) == -1
    assert discriminant(QuadraticForm(0, 0, 1)) == 0
    assert inner_product(QuadraticForm(1, 0, 1), QuadraticForm(-1, 0, 1)) == 0


def test_polarization_examples():
    assert QuadraticForm(0, 1, 0).polarize() == x + y
    assert QuadraticForm(1, 0, 1).polarize() == 1 + x * y
    assert QuadraticForm(0, 0, 1).polarize() == R.one()


@given(quadratics, quadratics)
def test_bracket_discriminant_identity(p, q):
    # Q({p,q}) = <p,q>^2 - 4 Q(p) Q(q) with Q the discriminant and <,> its polarization
    lhs = discriminant(poisson_bracket(p, q))
    rhs = inner_product(p, q) ** 2 - 4 * discriminant(p) * discriminant(q)
    assert lhs == rhs


def test_transvectant_order_zero_is_product():
    p = BinaryForm((0, 1), 1)
    q = BinaryForm((1, 1), 1)
    assert transvectant(p, q, 0) == BinaryForm((0, 1, 1), 2)


@given(quadratics)
def test_transvectant_odd_order_skew(q):
    qb = q.as_binary_form()
    assert transvectant(qb, qb, 1).is_zero()


def test_transvectant_square():
    zz = BinaryForm((0, 0, 1), 2)
    assert transvectant(zz, zz, 2).is_zero()


@given(quadratics, quadratics)
def test_low_order_transvectants_are_bracket_and_inner_product(p, q):
    pb, qb = p.as_binary_form(), q.as_binary_form()
    # (p,q)^(1) = -2 {p,q}, (p,q)^(2) = -2 <p,q>
    assert transvectant(pb, qb, 1) == poisson_bracket(p, q).as_binary_form().scale(-2)
    assert transvectant(pb, qb, 2) == BinaryForm((-2 * inner_product(p, q),), 0)


@given(quadratics, quartics)
def test_equivariant_transvectant_is_curvature_bracket(p, c):
    pb = p.as_binary_form()
    assert transvectant(pb, c, 2, convention="equivariant") == curvature_bracket(pb, c).with_bound(2)


def _invert(f):
    # f(z) -> z^m f(-1/z), the action of the rotation in SL(2)
    m = f.m
    return BinaryForm(tuple(f.coeffs[m - j] * (-1) ** (m - j) for j in range(m + 1)), m)


@given(quadratics, quartics)
def test_equivariant_transvectant_commutes_with_inversion(p, c):
    pb = p.as_binary_form()
    t = transvectant(pb, c, 2, convention="equivariant")
    assert transvectant(_invert(pb), _invert(c), 2, convention="equivariant") == _invert(t)


def test_printed_transvectant_breaks_equivariance():
    pb = QuadraticForm(1, 2, -3).as_binary_form()
    c = BinaryForm((1, -2, 0, 4, 1), 4)
    t = transvectant(pb, c, 2, convention="printed")
    assert t.degree > 2
    assert transvectant(_invert(pb), _invert(c), 2, convention="printed") != _invert(t)


def test_transvectant_rejects_bad_order():
    with pytest.raises(MalformedInputError):
        transvectant(BinaryForm((1,), 0), BinaryForm((1,), 0), 1)


def test_curvature_bracket_example():
    p = (x + y) ** 2
    assert curvature_bracket_fn(p, x, "x") == 6 * (x - y)
    assert curvature_bracket_fn(p, R.zero(), "x").is_zero()


def test_curvature_bracket_square_identity_example():
    p = (x - y) ** 2
    C = x**4
    lhs = p * p * (p * (C / (p * p)).diff("x")).diff("x")
    assert lhs == curvature_bracket_fn(p, C, "x")


def test_as_quadratic_rejects_cubic():
    with pytest.raises(MalformedInputError):
        as_quadratic(BinaryForm((0, 0, 0, 1), 3))


def test_descending_round_trip():
    f = BinaryForm.from_descending([1, 2, 3, 4, 5])
    assert f.coeffs == tuple(Fraction(c) for c in (5, 4, 3, 2, 1))
    assert f.descending() == tuple(Fraction(c) for c in (1, 2, 3, 4, 5))
    assert f(Fraction(1)) == 15
