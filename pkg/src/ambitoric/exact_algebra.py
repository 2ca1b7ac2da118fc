"""Exact rational functions over Q in a handful of named variables.

Polynomials are FLINT ``fmpq_mpoly`` objects; this module adds the
quotient field on top of them, with a canonical form (gcd-free, monic
denominator under lex order) so that equality of rational functions is
equality of normal forms.
"""

from __future__ import annotations

import os
import random
import re
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Union

import flint

from .errors import MalformedInputError, PoleError, ResourceError

DEFAULT_VARIABLES = ("x", "y", "z", "u", "v")
DEFAULT_DEGREE_CAP = 200

_RATIONAL_RE = re.compile(r"^-?[0-9]+(/[0-9]+)?$")

Scalar = Union[int, Fraction]


def parse_rational(text: str) -> Fraction:
    """Parse ``n`` or ``n/d`` (optional leading ``-``, decimal digits only)."""
    token = text.strip()
    if not _RATIONAL_RE.match(token):
        raise MalformedInputError(f"not an exact rational literal: {text!r}")
    value = Fraction(0)
    if "/" in token:
        num, den = token.split("/")
        if int(den) == 0:
            raise MalformedInputError(f"zero denominator in {text!r}")
        value = Fraction(int(num), int(den))
    else:
        value = Fraction(int(token))
    return value


def format_rational(value: Scalar) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def degree_cap() -> int:
    raw = os.environ.get("AMBITORIC_DEGREE_CAP")
    if raw is None:
        return DEFAULT_DEGREE_CAP
    try:
        cap = int(raw)
    except ValueError as exc:
        raise MalformedInputError(f"AMBITORIC_DEGREE_CAP must be an integer, got {raw!r}") from exc
    if cap < 1:
        raise MalformedInputError("AMBITORIC_DEGREE_CAP must be positive")
    return cap


def _debug_enabled() -> bool:
    return os.environ.get("AMBITORIC_DEBUG", "") not in ("", "0")


def _to_fmpq(value) -> flint.fmpq:
    if isinstance(value, flint.fmpq):
        return value
    value = Fraction(value)
    return flint.fmpq(value.numerator, value.denominator)


def _fmpq_to_fraction(value: flint.fmpq) -> Fraction:
    return Fraction(int(value.p), int(value.q))


class Ring:
    """A polynomial ring Q[v1, ..., vn] with lex order on the given names."""

    def __init__(self, names: Iterable[str]):
        self.names = tuple(names)
        if len(set(self.names)) != len(self.names):
            raise MalformedInputError(f"repeated variable names: {self.names}")
        self.ctx = flint.fmpq_mpoly_ctx.get(self.names, "lex")
        self._zero = self.ctx.from_dict({})
        self._one = self.ctx.from_dict({(0,) * len(self.names): 1})

    def __repr__(self):
        return f"Ring({', '.join(self.names)})"

    def __eq__(self, other):
        return isinstance(other, Ring) and other.names == self.names

    def __hash__(self):
        return hash(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise MalformedInputError(f"unknown variable {name!r}; ring has {self.names}") from None

    def const(self, value: Scalar) -> "RationalFunction":
        return RationalFunction._raw(self, self._one * _to_fmpq(value), self._one)

    def zero(self) -> "RationalFunction":
        return RationalFunction._raw(self, self._zero, self._one)

    def one(self) -> "RationalFunction":
        return RationalFunction._raw(self, self._one, self._one)

    def var(self, name: str) -> "RationalFunction":
        exps = [0] * len(self.names)
        exps[self.index(name)] = 1
        return RationalFunction._raw(self, self.ctx.from_dict({tuple(exps): 1}), self._one)

    def vars(self, *names: str):
        return tuple(self.var(n) for n in names)

    def univariate(self, name: str, coefficients_ascending: Iterable[Scalar]) -> "RationalFunction":
        """Polynomial sum_k c_k * name**k from constant-first coefficients."""
        i = self.index(name)
        terms = {}
        for k, c in enumerate(coefficients_ascending):
            c = Fraction(c)
            if c:
                exps = [0] * len(self.names)
                exps[i] = k
                terms[tuple(exps)] = _to_fmpq(c)
        return RationalFunction._raw(self, self.ctx.from_dict(terms), self._one)

    def polynomial(self, terms: Mapping[tuple, Scalar]) -> "RationalFunction":
        """Polynomial from a map {exponent tuple: coefficient}; zeros dropped."""
        clean = {}
        for exps, c in terms.items():
            if len(exps) != len(self.names):
                raise MalformedInputError(f"exponent tuple {exps} does not match {self.names}")
            if Fraction(c):
                clean[tuple(exps)] = _to_fmpq(c)
        return RationalFunction._raw(self, self.ctx.from_dict(clean), self._one)


@lru_cache(maxsize=None)
def ring(names: tuple = DEFAULT_VARIABLES) -> Ring:
    return Ring(names)


R = ring()


class RationalFunction:
    """Quotient num/den of polynomials, always stored in canonical form.

    Canonical form: gcd(num, den) = 1 and den has leading coefficient 1
    in lex order. The zero function is 0/1.
    """

    __slots__ = ("ring", "num", "den")

    def __init__(self, ring_: Ring, num, den=None):
        if den is None:
            den = ring_._one
        if den.is_zero():
            raise MalformedInputError("rational function with zero denominator")
        self.ring = ring_
        self.num, self.den = _canonical(num, den)
        self._check_degree()

    @classmethod
    def _raw(cls, ring_, num, den):
        obj = object.__new__(cls)
        obj.ring = ring_
        obj.num = num
        obj.den = den
        return obj

    def _check_degree(self):
        cap = degree_cap()
        if self.num.is_zero():
            return
        for d in (self.num.degrees(), self.den.degrees()):
            if d and max(d) > cap:
                raise ResourceError(f"polynomial degree {max(d)} exceeds cap {cap}")

    # -- construction helpers -------------------------------------------

    def _coerce(self, other) -> "RationalFunction":
        if isinstance(other, RationalFunction):
            if other.ring is not self.ring and other.ring != self.ring:
                raise MalformedInputError(f"mixing rings {self.ring} and {other.ring}")
            return other
        if isinstance(other, (int, Fraction, flint.fmpq, flint.fmpz)):
            return self.ring.const(other)
        return NotImplemented

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.num.is_zero():
            return self
        if self.num.is_zero():
            return other
        if self.den == other.den:
            num = self.num + other.num
            return _from_parts(self.ring, num, self.den)
        g = self.den.gcd(other.den)
        if g.is_one():
            num = self.num * other.den + other.num * self.den
            den = self.den * other.den
            return _from_parts(self.ring, num, den)
        d1 = self.den / g
        d2 = other.den / g
        num = self.num * d2 + other.num * d1
        den = d1 * other.den
        return _from_parts(self.ring, num, den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction._raw(self.ring, -self.num, self.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.num.is_zero() or other.num.is_zero():
            return self.ring.zero()
        if other.den.is_one() and other.num.is_constant():
            return RationalFunction._raw(self.ring, self.num * other.num, self.den)
        if self.den.is_one() and self.num.is_constant():
            return RationalFunction._raw(self.ring, other.num * self.num, other.den)
        g1 = self.num.gcd(other.den)
        g2 = other.num.gcd(self.den)
        n1 = self.num / g1 if not g1.is_one() else self.num
        d2 = other.den / g1 if not g1.is_one() else other.den
        n2 = other.num / g2 if not g2.is_one() else other.num
        d1 = self.den / g2 if not g2.is_one() else self.den
        out = RationalFunction._raw(self.ring, n1 * n2, d1 * d2)
        out._normalize_sign()
        out._check_degree()
        return out

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if self.num.is_zero():
            raise PoleError("inverse of the zero rational function")
        out = RationalFunction._raw(self.ring, self.den, self.num)
        out._normalize_sign()
        return out

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        out = RationalFunction._raw(self.ring, self.num ** n, self.den ** n)
        out._check_degree()
        return out

    def _normalize_sign(self):
        lc = self.den.leading_coefficient()
        if lc != 1:
            inv = 1 / lc
            self.num = self.num * inv
            self.den = self.den * inv

    # -- predicates and comparison ----------------------------------------

    def is_zero(self) -> bool:
        zero = self.num.is_zero()
        if _debug_enabled():
            _probabilistic_check(self, zero)
        return zero

    def __bool__(self):
        return not self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.is_one()

    def is_constant(self) -> bool:
        return self.den.is_one() and self.num.is_constant()

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        if self.num.is_zero():
            return Fraction(0)
        return _fmpq_to_fraction(self.num.leading_coefficient())

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((str(self.num), str(self.den)))

    # -- calculus and evaluation ------------------------------------------

    def diff(self, name: str) -> "RationalFunction":
        i = self.ring.index(name)
        if self.num.is_zero():
            return self
        dn = self.num.derivative(i)
        if self.den.is_one():
            return RationalFunction._raw(self.ring, dn, self.den)
        dd = self.den.derivative(i)
        if dd.is_zero():
            return _from_parts(self.ring, dn, self.den)
        return _from_parts(self.ring, dn * self.den - self.num * dd, self.den * self.den)

    def depends_on(self, name: str) -> bool:
        i = self.ring.index(name)
        return self.num.degrees()[i] > 0 or self.den.degrees()[i] > 0

    def evaluate(self, point: Mapping[str, Scalar]) -> Fraction:
        """Exact value at a point; every variable present must be assigned."""
        sub = {}
        for name in self.ring.names:
            if name in point:
                sub[name] = _to_fmpq(point[name])
        den = self.den.subs(sub)
        num = self.num.subs(sub)
        if not den.is_constant() or not num.is_constant():
            missing = [n for n in self.ring.names if n not in point and self.depends_on(n)]
            raise MalformedInputError(f"point does not assign variables {missing}")
        den_value = _poly_constant(den)
        if den_value == 0:
            raise PoleError(f"pole of {self} at {dict(point)}", denominator_value=den_value)
        return _poly_constant(num) / den_value

    def substitute(self, values: Mapping[str, Scalar]) -> "RationalFunction":
        sub = {name: _to_fmpq(v) for name, v in values.items()}
        den = self.den.subs(sub)
        if den.is_zero():
            raise PoleError(f"substitution {dict(values)} hits a pole of {self}")
        return RationalFunction(self.ring, self.num.subs(sub), den)

    def compose(self, images: Mapping[str, "RationalFunction"]) -> "RationalFunction":
        """Substitute rational functions for variables."""
        out_num = _compose_poly(self.ring, self.num, images)
        out_den = _compose_poly(self.ring, self.den, images)
        return out_num / out_den

    # -- inspection ---------------------------------------------------------

    def numerator(self) -> "RationalFunction":
        return RationalFunction._raw(self.ring, self.num, self.ring._one)

    def denominator(self) -> "RationalFunction":
        return RationalFunction._raw(self.ring, self.den, self.ring._one)

    def degrees(self) -> dict:
        dn = self.num.degrees() if not self.num.is_zero() else (0,) * len(self.ring.names)
        dd = self.den.degrees()
        return {n: (a, b) for n, a, b in zip(self.ring.names, dn, dd) if a or b}

    def terms(self) -> list:
        """Numerator terms as (exponent tuple, Fraction), lex-descending."""
        return [(tuple(e), _fmpq_to_fraction(c)) for e, c in self.num.terms()]

    def sample_monomial(self) -> str:
        """A short exact witness for a nonzero value: its leading term."""
        if self.num.is_zero():
            return "0"
        exps, coeff = self.terms()[0]
        mono = "*".join(
            f"{n}^{e}" if e > 1 else n for n, e in zip(self.ring.names, exps) if e
        )
        coeff_text = format_rational(coeff)
        return f"{coeff_text}*{mono}" if mono else coeff_text

    def __str__(self):
        num = str(self.num) if not self.num.is_zero() else "0"
        if self.den.is_one():
            return num
        return f"({num})/({self.den})"

    def __repr__(self):
        return f"RationalFunction({self})"


def _poly_constant(p) -> Fraction:
    if p.is_zero():
        return Fraction(0)
    return _fmpq_to_fraction(p.leading_coefficient())


def _canonical(num, den):
    if num.is_zero():
        return num, den.context().from_dict({(0,) * den.context().nvars(): 1})
    g = num.gcd(den)
    if not g.is_one():
        num = num / g
        den = den / g
    lc = den.leading_coefficient()
    if lc != 1:
        inv = 1 / lc
        num = num * inv
        den = den * inv
    return num, den


def _from_parts(ring_, num, den):
    if num.is_zero():
        return ring_.zero()
    out = RationalFunction._raw(ring_, *_canonical(num, den))
    out._check_degree()
    return out


def _compose_poly(ring_, poly, images):
    result = ring_.zero()
    gens = [images.get(n, ring_.var(n)) for n in ring_.names]
    for exps, coeff in poly.terms():
        term = ring_.const(_fmpq_to_fraction(coeff))
        for g, e in zip(gens, exps):
            if e:
                term = term * g ** int(e)
        result = result + term
    return result


def _probabilistic_check(r: RationalFunction, claimed_zero: bool, trials: int = 20, seed: int = 0):
    if not claimed_zero:
        return
    rng = random.Random(seed)
    for _ in range(trials):
        point = {n: Fraction(rng.randint(-97, 97), rng.randint(1, 13)) for n in r.ring.names}
        try:
            value = r.evaluate(point)
        except PoleError:
            continue
        if value != 0:
            raise AssertionError(f"normal form says zero but value {value} at {point}")


def random_point(r_or_ring, rng: random.Random, span: int = 50) -> dict:
    names = r_or_ring.names if isinstance(r_or_ring, Ring) else r_or_ring.ring.names
    return {n: Fraction(rng.randint(-span, span), rng.randint(1, 9)) for n in names}


def normalize(r: RationalFunction) -> RationalFunction:
    """Return the canonical representative (values are always canonical)."""
    return RationalFunction(r.ring, r.num, r.den)


def differentiate(r: RationalFunction, var: str) -> RationalFunction:
    return r.diff(var)


def evaluate(r: RationalFunction, point: Mapping[str, Scalar]) -> Fraction:
    return r.evaluate(point)
