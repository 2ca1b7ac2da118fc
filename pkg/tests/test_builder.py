"""Normal-form construction: metrics, forms, momentum maps, Calabi and PD families."""

import random
from fractions import Fraction

import pytest

from ambitoric.binary_forms import QuadraticForm, inner_product
from ambitoric.builder import (
    NAMED_Q,
    AmbitoricSpec,
    build,
    build_calabi,
    build_pd,
    momentum,
    orthogonal_basis,
    pd_symbolic,
    quartic,
    symplectic_potential,
)
from ambitoric.classifier import csc_conditions
from ambitoric.errors import DegenerateInputError, MalformedInputError
from ambitoric.exact_algebra import R
from ambitoric.instances import random_spec
from ambitoric.tensors import exterior_derivative, pfaffian

x, y = R.vars("x", "y")
A0 = [1, 2, 0, 1, 3]
B0 = [0, 1, -2, 0, 5]


def spec(t, A=A0, B=B0, **kw):
    return AmbitoricSpec(t, quartic(A), quartic(B), **kw)


def test_hyperbolic_display():
    m = build(spec("hyperbolic"))
    assert m.g0.comps[0, 0] == 1 / quartic(A0).as_function("x")
    assert m.f == (x + y) / (x - y)


def test_parabolic_kahler_form():
    m = build(spec("parabolic"))
    w = m.omegaplus.comps
    assert (w[0, 2], w[0, 3], w[1, 2], w[1, 3]) == (R.one(), y, R.one(), x)
    assert w[0, 1].is_zero() and w[2, 3].is_zero()


@pytest.mark.parametrize("form_type", ["parabolic", "hyperbolic", "elliptic"])
def test_forms_closed_for_random_data(form_type):
    rng = random.Random(form_type)
    for _ in range(3):
        m = build(random_spec(form_type, rng))
        assert exterior_derivative(m.omegaplus).is_zero()
        assert exterior_derivative(m.omegaminus).is_zero()
        # omega+ orients like g+, omega- the other way; in dimension four vol(f^2 g) = f^4 vol(g)
        assert pfaffian(m.omegaplus) == m.gplus.volume
        assert pfaffian(m.omegaminus) == -m.gminus.volume
        assert m.gminus.volume == m.gplus.volume * m.f**4


def test_conformal_factors():
    m = build(spec("elliptic"))
    assert m.gminus.comps[0, 0] == m.gplus.comps[0, 0] * m.f**2
    assert m.gplus.comps[0, 0] == m.g0.comps[0, 0] / m.f


@pytest.mark.parametrize("q", [QuadraticForm(0, 1, 0), QuadraticForm(1, 0, 1), QuadraticForm(0, 0, 1),
                               QuadraticForm(1, 0, 0), QuadraticForm(2, 0, -3), QuadraticForm(1, Fraction(1, 2), -2)])
def test_orthogonal_basis(q):
    e1, e2 = orthogonal_basis(q)
    assert inner_product(e1, q) == 0 and inner_product(e2, q) == 0
    a, b = e1.triple, e2.triple
    minors = (a[0] * b[1] - a[1] * b[0], a[0] * b[2] - a[2] * b[0], a[1] * b[2] - a[2] * b[1])
    assert any(minors)


def test_general_type_builds():
    m = build(spec("general", q=QuadraticForm(2, 0, -3)))
    assert exterior_derivative(m.omegaplus).is_zero()


def test_momentum_maps():
    h = build(spec("hyperbolic"))
    assert momentum(h, "plus", w=QuadraticForm(0, 0, 1))[0] == -1 / (x + y)
    assert momentum(h, "minus", p=QuadraticForm(0, 0, 1))[0] == -1 / (x - y)
    e = build(spec("elliptic"))
    assert momentum(e, "plus", w=QuadraticForm(-1, 0, 1))[0] == -(1 - x * y) / (1 + x * y)
    p = build(spec("parabolic"))
    pair = (momentum(p, "plus", w=QuadraticForm(0, -1, 0))[0], momentum(p, "plus", w=QuadraticForm(-1, 0, 0))[0])
    assert pair == (x + y, x * y)
    with pytest.raises(MalformedInputError):
        momentum(h, "minus", p=QuadraticForm(0, 1, 0))


@pytest.mark.parametrize("form_type", ["parabolic", "hyperbolic", "elliptic"])
def test_symplectic_potential(form_type):
    m = build(spec(form_type))
    chi = symplectic_potential(m)
    assert (exterior_derivative(chi) + m.omegaminus).is_zero()


def test_spec_validation():
    with pytest.raises(DegenerateInputError):
        build(spec("hyperbolic", A=[0, 0, 0, 0, 0]))
    with pytest.raises(MalformedInputError):
        spec("hyperbolic", p=QuadraticForm(0, 1, 0))
    with pytest.raises(MalformedInputError):
        spec("general")
    with pytest.raises(MalformedInputError):
        quartic([1, 2, 3])
    assert spec("elliptic").q == NAMED_Q["elliptic"]


@pytest.mark.parametrize("k", [0, 1, Fraction(-3, 2)])
def test_calabi_chart(k):
    c = build_calabi([1, 0, 2, 0, 3], k)
    assert exterior_derivative(c.alpha) == c.omega_sigma
    assert exterior_derivative(c.omegaplus).is_zero()
    assert exterior_derivative(c.omegaminus).is_zero()
    if k == 0:
        w = c.omega_sigma.comps
        assert w[2, 3] == R.one() and w[0, 1].is_zero()


def test_pd_instances():
    s = build_pd(1, 0, 0, 0, 0, 0, 1)
    assert s.a() == (1, 0, 0, 0, 1) and s.b() == (-1, 0, 0, 0, 1)
    assert s.p == QuadraticForm(0, 0, 1)
    assert all(v == 0 for _, v in csc_conditions(s, s.p))
    with pytest.raises(DegenerateInputError):
        build(build_pd(0, 0, 0, 0, 0, 0, 0))


def test_pd_symbolic_identities():
    pr, A, B = pd_symbolic()
    eps = pr.var("epsilon")
    a0, a1, a2, a3, a4 = A
    b0, b1, b2, b3, b4 = B
    assert (a0 + b0 + eps**2 * (a4 + b4)).is_zero()
    assert (a1 + b1 - eps * (a3 + b3)).is_zero()
    assert (a2 + b2).is_zero()
    assert (a1 - b1 + eps * (a3 - b3)).is_zero()
