"""Classification criteria, each confirmed by the tensor oracle."""

import random
from fractions import Fraction

import pytest

from ambitoric.binary_forms import QuadraticForm, discriminant, inner_product
from ambitoric.builder import AmbitoricSpec, build, build_calabi, build_pd, quartic
from ambitoric.classifier import (
    SCALAR_CALIBRATION,
    bach_flat_check,
    bflat_fourth_power,
    calabi_classify,
    classify,
    csc_conditions,
    csc_em_check,
    diagonal_ricci_killing_existence,
    diagonal_ricci_metric,
    einstein_conformal,
    extremal_check,
    extremal_scalar_forms,
    kahler_check,
    killing_tensor_from_FG,
    scalar_curvature_closed,
    scalar_curvature_oracle,
    w_of,
)
from ambitoric.errors import MalformedInputError, PreconditionError
from ambitoric.exact_algebra import R
from ambitoric.instances import (
    CSC_P,
    bach_instance,
    csc_instance,
    extremal_instance,
    null_orthogonal,
    random_spec,
)
from ambitoric.tensors import ChartTensor

x, y = R.vars("x", "y")
TYPES = ("parabolic", "hyperbolic", "elliptic")


def spec(t, A, B, **kw):
    return AmbitoricSpec(t, quartic(A), quartic(B), **kw)


FIXTURE = spec("hyperbolic", [0, 0, 0, 1, 0], [0, 0, 0, 1, 0])


def test_extremal_examples():
    assert extremal_check(FIXTURE).holds
    r = extremal_check(spec("parabolic", [1, 0, 0, 0, 0], [1, 0, 0, 0, 0]))
    assert not r.holds and r.verdict.digest() == "a0+b0 = 2"
    e = extremal_check(spec("elliptic", [0, 1, 0, 0, 0], [0, 0, 0, 1, 0]))
    assert e.holds and inner_product(e.pi, QuadraticForm(1, 0, 1)) == 0


def test_fixture_scalar_curvatures():
    splus, sminus = scalar_curvature_closed(FIXTURE)
    assert splus.is_zero()
    assert sminus == -12 / (x - y)
    assert scalar_curvature_oracle(build(FIXTURE)) == (splus, sminus)
    assert SCALAR_CALIBRATION == 1


def test_closed_form_with_vanishing_quartic():
    s = spec("parabolic", [0, 0, 0, 0, 0], [1, 0, 0, 0, 0])
    assert not any(t.is_constant() for t in scalar_curvature_closed(s))


@pytest.mark.parametrize("form_type", TYPES)
def test_extremal_scalar_forms_match_oracle(form_type):
    rng = random.Random(form_type + "s")
    for _ in range(3):
        s = extremal_instance(form_type, rng)
        assert extremal_scalar_forms(s) == scalar_curvature_oracle(build(s))


def test_w_sign_identity():
    rng = random.Random(11)
    from ambitoric.binary_forms import BinaryForm

    for _ in range(20):
        q = QuadraticForm(*[rng.randint(-5, 5) for _ in range(3)])
        P = BinaryForm(tuple(rng.randint(-5, 5) for _ in range(5)), 4)
        w = w_of(q, P)  # raises if w != -{q, (q,P)^(2)}
        assert inner_product(w, q) == 0


def test_bach_examples():
    assert bach_flat_check(FIXTURE).holds
    s = spec("parabolic", [0, 1, 0, 1, 0], [0, -1, 0, 0, 0])
    v = bach_flat_check(s)
    assert not v.holds and v.digest() == "a1(a3+b3)+4a0(a4+b4) = 1"
    assert bach_flat_check(spec("elliptic", [0, 1, 0, 0, 0], [0, 0, 0, 1, 0])).holds
    with pytest.raises(PreconditionError):
        bach_flat_check(spec("parabolic", [1, 0, 0, 0, 0], [1, 0, 0, 0, 0]))


def test_fixture_einstein():
    e = einstein_conformal(FIXTURE)
    assert e.which == "-" and e.einstein
    with pytest.raises(PreconditionError):
        einstein_conformal(spec("parabolic", [0, 1, 0, 1, 0], [0, -1, 0, 0, 0]))


@pytest.mark.parametrize("form_type", TYPES)
def test_bach_flat_instances_are_conformally_einstein(form_type):
    rng = random.Random(form_type + "e")
    s = bach_instance(form_type, rng, satisfy=True)
    m = build(s)
    e = einstein_conformal(m)
    assert e.conformally_flat or e.einstein
    ratio = bflat_fourth_power(m)
    if ratio is not None:
        assert ratio.is_constant()


def test_calabi_bach_flat_is_conformally_einstein():
    c = build_calabi([1, 0, 2, 0, 0], 2)
    s = c.gplus.curvature.scalar
    g = c.gplus.conformal((s * s).inverse())
    assert ChartTensor(g.chart, "dd", g.curvature.ricci_tracefree).is_zero()


def test_diagonal_ricci_examples():
    r = diagonal_ricci_metric(FIXTURE, QuadraticForm(0, 0, 1))
    assert r.diagonal and r.scalar_agrees
    with pytest.raises(MalformedInputError):
        diagonal_ricci_metric(FIXTURE, QuadraticForm(0, 1, 0))
    e = spec("elliptic", [1, 2, 0, 1, 3], [0, 1, -2, 0, 5])
    assert diagonal_ricci_metric(e, QuadraticForm(-1, 0, 1)).diagonal


def test_csc_examples():
    r = csc_em_check(build_pd(2, 1, Fraction(1, 2), -1, 3, 2, 5), QuadraticForm(2, 0, 1))
    assert r.holds and r.c is not None
    fx = spec("hyperbolic", [0, 0, 0, 1, 0], [0, 0, 0, 1, 0])
    r = csc_em_check(fx, QuadraticForm(0, 0, 1))
    assert r.holds and r.einstein and r.c == 0
    par = spec("parabolic", [0, 1, 0, 1, 0], [0, 1, 0, -1, 0])
    r = csc_em_check(par, QuadraticForm(0, Fraction(1, 2), 0))
    assert r.holds and r.table_holds


@pytest.mark.parametrize("form_type", TYPES)
def test_csc_invariant_matches_oracle(form_type):
    rng = random.Random(form_type + "c")
    for p in CSC_P[form_type]:
        for satisfy in (True, False):
            s = csc_instance(form_type, p, rng, satisfy)
            r = csc_em_check(s, p)  # raises unless the oracle agrees
            assert r.holds is satisfy and r.verdict.oracle is satisfy


def test_corrected_elliptic_row():
    p = QuadraticForm(-1, 0, 1)
    rng = random.Random(5)
    for satisfy in (True, False):
        for _ in range(4):
            s = csc_instance("elliptic", p, rng, satisfy)
            corrected = not any(v for _, v in csc_conditions(s, p, printed=False))
            assert corrected is satisfy


def test_printed_elliptic_row_has_a_counterexample():
    # satisfies a2+b2 = a0+b0 = a4+b4 = a1+b1+a3+b3 = 0, yet s^g is not constant
    s = spec("elliptic", [1, 2, 3, -4, 5], [-1, 2, -3, 0, -5])
    p = QuadraticForm(-1, 0, 1)
    r = csc_em_check(s, p)
    assert r.table_holds and not r.holds and not r.verdict.oracle
    assert diagonal_ricci_metric(s, p).scalar_oracle == (-12 * x * y + 48 * x + 48 * y - 12) / (x * y + 1)


def test_killing_tensor_examples():
    m = build(FIXTURE)
    assert killing_tensor_from_FG(m, barycentric=True).killing
    assert killing_tensor_from_FG(m, [1, 0], [1, 0]).killing
    # constant F != G: h = 2, f = 4, S = 4 g + 2 g(I., .)
    r = killing_tensor_from_FG(m, 3, 1)
    assert r.killing and r.metric == m.g0.conformal(R.const(2))
    with pytest.raises(PreconditionError):
        killing_tensor_from_FG(m, 2, 2)


def test_diagonal_killing_existence_examples():
    hyper = null_orthogonal(QuadraticForm(0, 1, 0))
    assert hyper and all(discriminant(p) == 0 for p in hyper)
    assert diagonal_ricci_killing_existence(FIXTURE, hyper[0]).holds
    e = spec("elliptic", [1, 2, 0, 1, 3], [0, 1, -2, 0, 5])
    assert not diagonal_ricci_killing_existence(e, QuadraticForm(-1, 0, 1)).holds
    par = spec("parabolic", [1, 2, 0, 1, 3], [0, 1, -2, 0, 5])
    assert not diagonal_ricci_killing_existence(par, QuadraticForm(0, Fraction(1, 2), 0)).holds


@pytest.mark.parametrize(
    "V, k, flags",
    [
        ([1, 0, 2, 0, 0], 2, (True, True, False, False)),
        ([0, 0, 2, 1, 0], 2, (True, True, True, False)),
        ([0, 1, -1, 0, 0], -1, (True, True, True, True)),
        ([2, 1, 0, 4, 2], 0, (True, False, False, False)),
        ([0, 1, 1, 0, 3], 2, (False, False, False, False)),
    ],
)
def test_calabi_flags(V, k, flags):
    r = calabi_classify(V, k)  # raises if the oracle disagrees
    assert tuple(r.flags[key] for key in ("extremal", "bach_flat", "csc", "kahler_einstein")) == flags


@pytest.mark.parametrize("form_type", TYPES)
def test_kahler_check_random(form_type):
    rng = random.Random(form_type + "k")
    m = build(random_spec(form_type, rng))
    assert kahler_check(m, "+").holds and kahler_check(m, "-").holds


def test_classify_report():
    rep = classify(AmbitoricSpec("hyperbolic", FIXTURE.A, FIXTURE.B, p=QuadraticForm(0, 0, 1)))
    names = [v.name for v in rep.verdicts]
    assert names == ["extremal", "bach_flat", "einstein", "csc"]
    assert all(v.holds for v in rep.verdicts)
    assert rep.derived["c"] == 0
