"""Binary forms in an affine coordinate: quadratics, brackets, transvectants.

A quadratic form is stored as ``(q0, q1, q2)`` meaning
``q(z) = q0*z**2 + 2*q1*z + q2``; note that ``q1`` is HALF the linear
coefficient. General forms of degree bound ``m`` are coefficient tuples,
constant term first.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Sequence

from .errors import MalformedInputError
from .exact_algebra import R, RationalFunction, Ring


def _frac_tuple(values) -> tuple:
    return tuple(Fraction(v) for v in values)


@dataclass(frozen=True)
class BinaryForm:
    """Element of S^m W*: polynomial of degree <= m, constant term first."""

    coeffs: tuple
    m: int

    def __post_init__(self):
        coeffs = _frac_tuple(self.coeffs)
        if len(coeffs) > self.m + 1 and any(coeffs[self.m + 1:]):
            raise MalformedInputError(f"form of degree > {self.m}: {coeffs}")
        coeffs = coeffs[: self.m + 1] + (Fraction(0),) * (self.m + 1 - len(coeffs))
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def from_descending(cls, coeffs: Sequence, m: int = None) -> "BinaryForm":
        """From ``a0, a1, ...`` meaning a0*z**m + a1*z**(m-1) + ... ."""
        coeffs = list(coeffs)
        if m is None:
            m = len(coeffs) - 1
        if len(coeffs) != m + 1:
            raise MalformedInputError(f"expected {m + 1} coefficients, got {len(coeffs)}")
        return cls(tuple(reversed(coeffs)), m)

    def descending(self) -> tuple:
        return tuple(reversed(self.coeffs))

    @property
    def degree(self) -> int:
        """Actual degree (-1 for the zero form)."""
        for k in range(self.m, -1, -1):
            if self.coeffs[k]:
                return k
        return -1

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def derivative(self, k: int = 1) -> "BinaryForm":
        coeffs = list(self.coeffs)
        m = self.m
        for _ in range(k):
            coeffs = [i * coeffs[i] for i in range(1, len(coeffs))] or [Fraction(0)]
            m = max(m - 1, 0)
        return BinaryForm(tuple(coeffs), m)

    def __add__(self, other: "BinaryForm") -> "BinaryForm":
        m = max(self.m, other.m)
        a = self.coeffs + (Fraction(0),) * (m - self.m)
        b = other.coeffs + (Fraction(0),) * (m - other.m)
        return BinaryForm(tuple(x + y for x, y in zip(a, b)), m)

    def __neg__(self):
        return BinaryForm(tuple(-c for c in self.coeffs), self.m)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "BinaryForm":
        c = Fraction(c)
        return BinaryForm(tuple(c * a for a in self.coeffs), self.m)

    def __mul__(self, other):
        if isinstance(other, BinaryForm):
            out = [Fraction(0)] * (self.m + other.m + 1)
            for i, a in enumerate(self.coeffs):
                if a:
                    for j, b in enumerate(other.coeffs):
                        out[i + j] += a * b
            return BinaryForm(tuple(out), self.m + other.m)
        return self.scale(other)

    __rmul__ = __mul__

    def __call__(self, z):
        total = 0
        for c in reversed(self.coeffs):
            total = total * z + c
        return total

    def as_function(self, var: str, ring: Ring = R) -> RationalFunction:
        return ring.univariate(var, self.coeffs)

    def with_bound(self, m: int) -> "BinaryForm":
        return BinaryForm(self.coeffs, m)

    def __str__(self):
        terms = []
        for k in range(self.m, -1, -1):
            c = self.coeffs[k]
            if c:
                mono = "" if k == 0 else ("z" if k == 1 else f"z^{k}")
                terms.append(f"{c}*{mono}" if mono else f"{c}")
        return " + ".join(terms) if terms else "0"


@dataclass(frozen=True)
class QuadraticForm:
    """q(z) = q0*z**2 + 2*q1*z + q2."""

    q0: Fraction = Fraction(0)
    q1: Fraction = Fraction(0)
    q2: Fraction = Fraction(0)

    def __post_init__(self):
        for name in ("q0", "q1", "q2"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))

    @classmethod
    def from_polynomial(cls, a2, a1, a0) -> "QuadraticForm":
        """From ordinary coefficients of a2*z**2 + a1*z + a0."""
        return cls(Fraction(a2), Fraction(a1) / 2, Fraction(a0))

    @property
    def triple(self) -> tuple:
        return (self.q0, self.q1, self.q2)

    def is_zero(self) -> bool:
        return not (self.q0 or self.q1 or self.q2)

    def as_binary_form(self) -> BinaryForm:
        return BinaryForm((self.q2, 2 * self.q1, self.q0), 2)

    def __call__(self, z):
        return self.q0 * z * z + 2 * self.q1 * z + self.q2

    def polarize(self, x: str = "x", y: str = "y", ring: Ring = R) -> RationalFunction:
        X, Y = ring.var(x), ring.var(y)
        return self.q0 * X * Y + self.q1 * (X + Y) + self.q2

    def as_function(self, var: str, ring: Ring = R) -> RationalFunction:
        return self.as_binary_form().as_function(var, ring)

    def __add__(self, other):
        return QuadraticForm(self.q0 + other.q0, self.q1 + other.q1, self.q2 + other.q2)

    def __sub__(self, other):
        return QuadraticForm(self.q0 - other.q0, self.q1 - other.q1, self.q2 - other.q2)

    def __neg__(self):
        return QuadraticForm(-self.q0, -self.q1, -self.q2)

    def scale(self, c) -> "QuadraticForm":
        c = Fraction(c)
        return QuadraticForm(c * self.q0, c * self.q1, c * self.q2)

    def __str__(self):
        return f"({self.q0})z^2 + 2({self.q1})z + ({self.q2})"


def as_quadratic(form: BinaryForm) -> QuadraticForm:
    if form.degree > 2:
        raise MalformedInputError(f"not a quadratic: {form}")
    c = form.coeffs + (Fraction(0),) * 3
    return QuadraticForm(c[2], c[1] / 2, c[0])


def poisson_bracket(q: QuadraticForm, w: QuadraticForm) -> QuadraticForm:
    """{q, w} = q'w - w'q, in the (q0, q1, q2) convention."""
    return QuadraticForm(
        2 * q.q0 * w.q1 - 2 * q.q1 * w.q0,
        q.q0 * w.q2 - q.q2 * w.q0,
        2 * q.q1 * w.q2 - 2 * q.q2 * w.q1,
    )


def discriminant(q: QuadraticForm) -> Fraction:
    """Q(q) = q1**2 - q0*q2; positive for two real roots."""
    return q.q1 * q.q1 - q.q0 * q.q2


def inner_product(q: QuadraticForm, p: QuadraticForm) -> Fraction:
    """Polarization of Q: <q,p> = 2 q1 p1 - (q2 p0 + q0 p2), so <q,q> = 2Q(q)."""
    return 2 * q.q1 * p.q1 - (q.q2 * p.q0 + q.q0 * p.q2)


def polarize(q: QuadraticForm, x: str = "x", y: str = "y", ring: Ring = R) -> RationalFunction:
    return q.polarize(x, y, ring)


def transvectant(p: BinaryForm, q: BinaryForm, r: int, convention: str = "printed") -> BinaryForm:
    """Order-r transvectant of p in S^m and q in S^n.

    ``convention="printed"`` evaluates

        sum_j (-1)^j C(n-j, r-j) C(m-r+j, j) p^(j) q^(r-j)

    exactly as usually displayed. For m != n that sum is not SL(2)-equivariant;
    ``convention="equivariant"`` exchanges the roles of m and n in the
    binomials, which is the equivariant operator (and for (m, n, r) = (2, 4, 2)
    coincides with :func:`curvature_bracket`). Both agree when m == n.
    """
    m, n = p.m, q.m
    if not 0 <= r <= min(m, n):
        raise MalformedInputError(f"transvectant order {r} outside [0, {min(m, n)}]")
    if convention == "printed":
        bm, bn = m, n
    elif convention == "equivariant":
        bm, bn = n, m
    else:
        raise MalformedInputError(f"unknown transvectant convention {convention!r}")
    total = BinaryForm((), m + n - r)
    for j in range(r + 1):
        c = (-1) ** j * comb(bn - j, r - j) * comb(bm - r + j, j)
        if c:
            term = (p.derivative(j) * q.derivative(r - j)).with_bound(m + n - r)
            total = total + term.scale(c)
    # the printed sum can overshoot the target degree when m != n
    return total.with_bound(max(m + n - 2 * r, total.degree))


def curvature_bracket_fn(p: RationalFunction, c: RationalFunction, var: str) -> RationalFunction:
    """p C'' - 3 p' C' + 6 p'' C, derivatives in ``var`` (other variables frozen)."""
    p1, c1 = p.diff(var), c.diff(var)
    return p * c1.diff(var) - 3 * p1 * c1 + 6 * p1.diff(var) * c


def curvature_bracket(p: BinaryForm, c: BinaryForm) -> BinaryForm:
    """Same operator on forms in one variable; result has degree bound m + n - 4."""
    out = (p * c.derivative(2)) - (p.derivative() * c.derivative()).scale(3) + (p.derivative(2) * c).scale(6)
    return out.with_bound(max(p.m + c.m - 4, out.degree, 0))
