"""Random coefficient sets that satisfy or violate the normal-form criteria.

Coefficients are integers drawn from [-5, 5]. A violating instance is a
satisfying one with a single coefficient of B raised by one, chosen so that
one of the conditions breaks.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Optional

from .binary_forms import QuadraticForm, as_quadratic, inner_product, transvectant
from .builder import NAMED_Q, AmbitoricSpec, quartic
from .classifier import (
    bach_condition,
    csc_conditions,
    csc_invariant,
    extremal_conditions,
    extremal_invariant,
    w_of,
)

SPAN = 5

# p choices with printed CSC conditions, per type
CSC_P = {
    "parabolic": [QuadraticForm(0, Fraction(1, 2), 0)],
    "hyperbolic": [QuadraticForm(1, 0, 1), QuadraticForm(-1, 0, 1), QuadraticForm(0, 0, 1)],
    "elliptic": [QuadraticForm(-1, 0, 1), QuadraticForm(0, Fraction(1, 2), 0)],
}


def random_coeffs(rng: random.Random, n: int = 5) -> list:
    while True:
        c = [rng.randint(-SPAN, SPAN) for _ in range(n)]
        if any(c):
            return c


def random_spec(form_type: str, rng: random.Random) -> AmbitoricSpec:
    return AmbitoricSpec(form_type, quartic(random_coeffs(rng)), quartic(random_coeffs(rng)))


def _bump(spec: AmbitoricSpec, index: int, amount=1) -> AmbitoricSpec:
    b = list(spec.b())
    b[index] += amount
    return AmbitoricSpec(spec.form_type, spec.A, quartic(b), q=spec.q if spec.form_type == "general" else None, p=spec.p)


def _violate(spec: AmbitoricSpec, conditions, rng: random.Random) -> AmbitoricSpec:
    """Raise one B coefficient by one so that some listed condition fails."""
    order = list(range(5))
    rng.shuffle(order)
    for j in order:
        cand = _bump(spec, j)
        if cand.B.is_zero():
            continue
        if any(v != 0 for _, v in conditions(cand)):
            return cand
    raise RuntimeError("no single-coefficient perturbation breaks the conditions")


def extremal_instance(form_type: str, rng: random.Random, satisfy: bool = True) -> AmbitoricSpec:
    """B is solved from A so the table conditions hold, then perturbed if asked."""
    while True:
        a = random_coeffs(rng)
        b = random_coeffs(rng)
        if form_type == "parabolic":
            b[0], b[1], b[2] = -a[0], -a[1], -a[2]
        elif form_type == "hyperbolic":
            b[0], b[2], b[4] = -a[0], -a[2], -a[4]
        elif form_type == "elliptic":
            b[2] = -a[2]
            b[0] = -a[0] - a[4] - b[4]
            b[1] = a[3] + b[3] - a[1]
        else:
            raise ValueError(form_type)
        if not any(b):
            continue
        spec = AmbitoricSpec(form_type, quartic(a), quartic(b))
        if satisfy:
            return spec
        return _violate(spec, extremal_conditions, rng)


def bach_instance(form_type: str, rng: random.Random, satisfy: bool = True) -> AmbitoricSpec:
    """Extremal instance with pi proportional to w (Bach-flat) or not."""
    q = NAMED_Q[form_type]
    for _ in range(1000):
        spec = extremal_instance(form_type, rng)
        ok, pi, P = extremal_invariant(spec)
        w = w_of(q, P)
        if satisfy:
            if w.is_zero():
                pi = pi  # any pi works
            else:
                pi = w.scale(rng.randint(-2, 2))
            A = (q.as_binary_form() * pi.as_binary_form()) + P
            B = (q.as_binary_form() * pi.as_binary_form()) - P
            if A.is_zero() or B.is_zero():
                continue
            cand = AmbitoricSpec(form_type, A.with_bound(4), B.with_bound(4))
            if bach_condition(cand)[1] == 0:
                return cand
        else:
            # shift P by one coefficient: A + B (hence extremality) is unchanged
            if bach_condition(spec)[1] != 0:
                return spec
            for j in range(5):
                bump = [0] * 5
                bump[j] = 1
                A = spec.A + quartic(bump)
                B = spec.B - quartic(bump)
                if A.is_zero() or B.is_zero():
                    continue
                cand = AmbitoricSpec(form_type, A, B)
                if bach_condition(cand)[1] != 0:
                    return cand
    raise RuntimeError("could not generate a Bach instance")


def _csc_linear_fix(form_type: str, p: QuadraticForm, rng: random.Random) -> Optional[AmbitoricSpec]:
    q = NAMED_Q[form_type]
    # rho orthogonal to p: random integer combination of a basis of p-perp
    from .builder import orthogonal_basis

    e1, e2 = orthogonal_basis(p)
    rho = e1.scale(rng.randint(-2, 2)) + e2.scale(rng.randint(-2, 2))
    Rc = random_coeffs(rng)
    R = quartic(Rc)

    def functional(form):
        return inner_product(as_quadratic(transvectant(p.as_binary_form(), form, 2, convention="equivariant")), q)

    val = functional(R)
    if val != 0:
        for j in range(5):
            unit = [0] * 5
            unit[j] = 1
            slope = functional(quartic(unit))
            if slope != 0:
                Rc[j] -= val / slope
                R = quartic(Rc)
                break
    prho = p.as_binary_form() * rho.as_binary_form()
    A = (prho + R).with_bound(4)
    B = (prho - R).with_bound(4)
    if A.is_zero() or B.is_zero():
        return None
    return AmbitoricSpec(form_type, A, B, p=p)


def csc_instance(form_type: str, p: QuadraticForm, rng: random.Random, satisfy: bool = True) -> AmbitoricSpec:
    for _ in range(1000):
        spec = _csc_linear_fix(form_type, p, rng)
        if spec is None:
            continue
        if not csc_invariant(spec, p)[0]:
            continue
        if satisfy:
            return spec
        order = list(range(5))
        rng.shuffle(order)
        for j in order:
            cand = _bump(spec, j)
            if not cand.B.is_zero() and not csc_invariant(cand, p)[0]:
                return cand
    raise RuntimeError("could not generate a CSC instance")


def printed_csc_instance(form_type: str, p: QuadraticForm, rng: random.Random, satisfy: bool = True) -> AmbitoricSpec:
    """Instance built to satisfy the printed coefficient conditions literally."""
    for _ in range(1000):
        a = random_coeffs(rng)
        b = random_coeffs(rng)
        e = p.q0
        if form_type == "parabolic":
            b[0], b[2], b[4], b[1] = -a[0], -a[2], -a[4], a[1]
        elif form_type == "hyperbolic":
            b[2] = -a[2]
            b[0] = -a[0] - e * e * (a[4] + b[4])
            # a1 + b1 = e(a3 + b3), a1 - b1 = -e(a3 - b3)  =>  a1 = e b3, b1 = e a3
            a[1] = e * b[3]
            b[1] = e * a[3]
        elif form_type == "elliptic" and p == QuadraticForm(-1, 0, 1):
            b[2], b[0], b[4] = -a[2], -a[0], -a[4]
            b[1] = -a[1] - a[3] - b[3]
        elif form_type == "elliptic":
            b[0], b[2], b[4] = -a[0], -a[2], -a[4]
            b[1] = a[1] + a[3] - b[3]
        if not any(b) or not any(a):
            continue
        spec = AmbitoricSpec(form_type, quartic(a), quartic(b), p=p)
        if satisfy:
            return spec
        return _violate(spec, lambda s: csc_conditions(s, p), rng)
    raise RuntimeError("could not generate an instance")


def random_orthogonal(q: QuadraticForm, rng: random.Random) -> QuadraticForm:
    from .builder import orthogonal_basis

    e1, e2 = orthogonal_basis(q)
    while True:
        p = e1.scale(rng.randint(-3, 3)) + e2.scale(rng.randint(-3, 3))
        if not p.is_zero():
            return p


def null_orthogonal(q: QuadraticForm) -> list:
    """Nonzero p with <p, q> = 0 and Q(p) = 0 (rational solutions only)."""
    from .binary_forms import discriminant
    from .builder import orthogonal_basis

    e1, e2 = orthogonal_basis(q)
    # Q(s e1 + t e2) = a s^2 + 2 b s t + c t^2
    a = discriminant(e1)
    c = discriminant(e2)
    b = (inner_product(e1, e2)) / 2
    sols = []
    if a == 0:
        sols.append(e1)
    if c == 0:
        sols.append(e2)
    disc = b * b - a * c
    if disc >= 0 and a != 0:
        root = _rational_sqrt(disc)
        if root is not None:
            for r in {root, -root}:
                s = (-b + r) / a  # t = 1
                cand = e1.scale(s) + e2
                if not cand.is_zero() and cand not in sols:
                    sols.append(cand)
    return sols


def _rational_sqrt(v: Fraction) -> Optional[Fraction]:
    from math import isqrt

    v = Fraction(v)
    n, d = v.numerator, v.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None
