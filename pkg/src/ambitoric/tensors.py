"""Exact tensor calculus on a coordinate chart.

Components are :class:`RationalFunction` values in the chart's ring.
Coordinates that are not ring variables (the torus angles ``t1``, ``t2``)
are cyclic: every component is independent of them, so their partial
derivatives vanish identically.

Conventions
-----------
* ``R(X,Y)Z = D_X D_Y Z - D_Y D_X Z - D_[X,Y] Z``; components
  ``R^a_{bcd}`` with ``R(d_c, d_d) d_b = R^a_{bcd} d_a``.
* ``Ric_{bd} = R^a_{bad}`` (the trace of ``Z -> R(Z,X)Y``); spheres have
  positive scalar curvature.
* Lowered ``R_{abcd} = g_{ae} R^e_{bcd}``; Kulkarni-Nomizu split
  ``R = W + P (.) g`` with Schouten tensor ``P = (Ric - s g / 6) / 2``.
* ``J^a_b`` is the component of ``J(d_b)`` along ``d_a``; on 1-forms
  ``J alpha = -alpha o J``, so that ``J(X^flat) = (JX)^flat``.
* Tensors carry a ``kinds`` string, one letter per slot: ``u`` for an
  upper (contravariant) index, ``d`` for a lower one.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import DegenerateInputError, InconsistencyError, MalformedInputError
from .exact_algebra import R, RationalFunction, Ring


@dataclass(frozen=True)
class Chart:
    coords: tuple
    ring: Ring = R
    orientation: int = 1

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(self.coords))
        if self.orientation not in (1, -1):
            raise MalformedInputError("orientation flag must be +1 or -1")

    @property
    def n(self) -> int:
        return len(self.coords)

    @cached_property
    def active(self) -> tuple:
        """Indices of coordinates that components may depend on."""
        return tuple(i for i, c in enumerate(self.coords) if c in self.ring.names)

    def d(self, f: RationalFunction, i: int) -> RationalFunction:
        name = self.coords[i]
        if name not in self.ring.names:
            return self.ring.zero()
        return f.diff(name)

    def with_orientation(self, orientation: int) -> "Chart":
        return Chart(self.coords, self.ring, orientation)

    def zero(self) -> RationalFunction:
        return self.ring.zero()


def zeros(chart: Chart, rank: int) -> np.ndarray:
    arr = np.empty((chart.n,) * rank, dtype=object)
    z = chart.zero()
    for idx in np.ndindex(arr.shape):
        arr[idx] = z
    return arr


class ChartTensor:
    """Tensor field with rational components; ``kinds`` gives index positions."""

    def __init__(self, chart: Chart, kinds: str, comps: np.ndarray, symmetry: str = "none"):
        if comps.shape != (chart.n,) * len(kinds):
            raise MalformedInputError(f"component shape {comps.shape} does not match kinds {kinds!r}")
        self.chart = chart
        self.kinds = kinds
        self.comps = comps
        self.symmetry = symmetry

    @classmethod
    def zero(cls, chart: Chart, kinds: str) -> "ChartTensor":
        return cls(chart, kinds, zeros(chart, len(kinds)))

    @classmethod
    def from_entries(cls, chart: Chart, kinds: str, entries: dict, antisymmetric=False, symmetric=False):
        """Build from {index tuple: value}; fills the mirrored entries when asked."""
        comps = zeros(chart, len(kinds))
        for idx, value in entries.items():
            if not isinstance(value, RationalFunction):
                value = chart.ring.const(value)
            comps[idx] = comps[idx] + value
            if antisymmetric:
                comps[idx[::-1]] = comps[idx[::-1]] - value
            elif symmetric and idx[::-1] != idx:
                comps[idx[::-1]] = comps[idx[::-1]] + value
        sym = "antisymmetric" if antisymmetric else "symmetric" if symmetric else "none"
        return cls(chart, kinds, comps, sym)

    @property
    def rank(self) -> int:
        return len(self.kinds)

    def __getitem__(self, idx):
        return self.comps[idx]

    def map(self, fn) -> "ChartTensor":
        out = np.empty(self.comps.shape, dtype=object)
        for idx in np.ndindex(out.shape):
            out[idx] = fn(self.comps[idx])
        return ChartTensor(self.chart, self.kinds, out, self.symmetry)

    def scale(self, f) -> "ChartTensor":
        return self.map(lambda c: c * f)

    def __add__(self, other: "ChartTensor") -> "ChartTensor":
        self._check_compatible(other)
        return ChartTensor(self.chart, self.kinds, self.comps + other.comps, _meet(self.symmetry, other.symmetry))

    def __sub__(self, other: "ChartTensor") -> "ChartTensor":
        self._check_compatible(other)
        return ChartTensor(self.chart, self.kinds, self.comps - other.comps, _meet(self.symmetry, other.symmetry))

    def __neg__(self):
        return self.map(lambda c: -c)

    def _check_compatible(self, other):
        if other.kinds != self.kinds or other.chart.coords != self.chart.coords:
            raise MalformedInputError("tensors live on different charts or have different valence")

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.comps.flat)

    def nonzero_entries(self) -> list:
        return [(idx, self.comps[idx]) for idx in np.ndindex(self.comps.shape) if self.comps[idx]]

    def __eq__(self, other):
        if not isinstance(other, ChartTensor):
            return NotImplemented
        return self.kinds == other.kinds and all(a == b for a, b in zip(self.comps.flat, other.comps.flat))

    def __hash__(self):
        return id(self)

    def matrix(self) -> list:
        if self.rank != 2:
            raise MalformedInputError("matrix() needs a rank-2 tensor")
        return [[self.comps[i, j] for j in range(self.chart.n)] for i in range(self.chart.n)]

    def residual_witness(self):
        """First nonzero component as (index, value), or None."""
        for idx in np.ndindex(self.comps.shape):
            if self.comps[idx]:
                return idx, self.comps[idx]
        return None

    def witness_text(self) -> str:
        """Digest of a residual: 'zero', or one nonzero component and its leading term."""
        w = self.residual_witness()
        if w is None:
            return "zero"
        idx, value = w
        return f"[{','.join(map(str, idx))}] {value.sample_monomial()}"

    def __repr__(self):
        return f"ChartTensor(kinds={self.kinds!r}, coords={self.chart.coords})"


def _meet(a: str, b: str) -> str:
    return a if a == b else "none"


# ---------------------------------------------------------------------------
# linear algebra over the rational-function field


def _det(m: list) -> RationalFunction:
    """Determinant by Gaussian elimination over the field."""
    n = len(m)
    a = [row[:] for row in m]
    one = a[0][0].ring.one()
    det = one
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col]), None)
        if pivot is None:
            return a[0][0].ring.zero()
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            det = -det
        det = det * a[col][col]
        inv = a[col][col].inverse()
        for r in range(col + 1, n):
            if a[r][col]:
                factor = a[r][col] * inv
                for c in range(col, n):
                    if a[col][c]:
                        a[r][c] = a[r][c] - factor * a[col][c]
    return det


def _inverse(m: list) -> list:
    n = len(m)
    ring_ = m[0][0].ring
    a = [row[:] + [ring_.one() if i == j else ring_.zero() for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col]), None)
        if pivot is None:
            raise DegenerateInputError("metric is singular (determinant identically zero)")
        a[col], a[pivot] = a[pivot], a[col]
        inv = a[col][col].inverse()
        a[col] = [c * inv if c else c for c in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                factor = a[r][col]
                a[r] = [x - factor * y if y else x for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def _canonical_sqrt(f: RationalFunction):
    """Exact square root with positive leading coefficients, or None."""
    if f.is_zero():
        return f
    num, den = f.num, f.den
    try:
        sn = num.sqrt()
        sd = den.sqrt()
    except Exception:
        return None
    if sn.leading_coefficient() < 0:
        sn = -sn
    if sd.leading_coefficient() < 0:
        sd = -sd
    return RationalFunction(f.ring, sn, sd)


class Metric(ChartTensor):
    """Symmetric nondegenerate (0,2) tensor with cached inverse and curvature."""

    def __init__(self, chart: Chart, comps):
        if not isinstance(comps, np.ndarray):
            arr = zeros(chart, 2)
            for i in range(chart.n):
                for j in range(chart.n):
                    v = comps[i][j]
                    arr[i, j] = v if isinstance(v, RationalFunction) else chart.ring.const(v)
            comps = arr
        super().__init__(chart, "dd", comps, "symmetric")
        for i in range(chart.n):
            for j in range(i + 1, chart.n):
                if comps[i, j] != comps[j, i]:
                    raise MalformedInputError(f"metric is not symmetric at ({i},{j})")

    @classmethod
    def from_tensor(cls, t: ChartTensor) -> "Metric":
        return cls(t.chart, t.comps)

    @property
    def n(self) -> int:
        return self.chart.n

    @cached_property
    def det(self) -> RationalFunction:
        return _det(self.matrix())

    @cached_property
    def inv(self) -> np.ndarray:
        if self.det.is_zero():
            raise DegenerateInputError("metric is singular (determinant identically zero)")
        inv = _inverse(self.matrix())
        arr = zeros(self.chart, 2)
        for i in range(self.n):
            for j in range(self.n):
                arr[i, j] = inv[i][j]
        return arr

    @cached_property
    def volume(self) -> RationalFunction:
        """Component vol_{01..n-1} of the oriented volume form."""
        root = _canonical_sqrt(self.det)
        if root is None:
            raise DegenerateInputError("det(g) is not a perfect square; volume form is not rational")
        return root * self.chart.orientation

    @cached_property
    def curvature(self) -> "CurvatureBundle":
        return _curvature(self)

    def conformal(self, factor: RationalFunction) -> "Metric":
        return Metric(self.chart, self.comps * factor)

    def with_chart(self, chart: Chart) -> "Metric":
        return Metric(chart, self.comps)


@dataclass
class CurvatureBundle:
    christoffel: np.ndarray  # Gamma^a_{bc}
    riemann: np.ndarray  # R^a_{bcd}
    ricci: np.ndarray  # Ric_{bd}
    scalar: RationalFunction
    metric: Metric = field(repr=False)

    @cached_property
    def riemann_lowered(self) -> np.ndarray:
        g = self.metric
        n = g.n
        out = zeros(g.chart, 4)
        for a, b, c, d in itertools.product(range(n), repeat=4):
            if c >= d:
                continue
            total = g.chart.zero()
            for e in range(n):
                if g.comps[a, e] and self.riemann[e, b, c, d]:
                    total = total + g.comps[a, e] * self.riemann[e, b, c, d]
            out[a, b, c, d] = total
            out[a, b, d, c] = -total
        return out

    @cached_property
    def ricci_tracefree(self) -> np.ndarray:
        g = self.metric
        return self.ricci - g.comps * (self.scalar / g.n)

    @cached_property
    def schouten(self) -> np.ndarray:
        g = self.metric
        n = g.n
        return (self.ricci - g.comps * (self.scalar / (2 * (n - 1)))) * g.chart.ring.const(
            Fraction(1, n - 2)
        )


def curvature(g: Metric) -> CurvatureBundle:
    return g.curvature


def _curvature(g: Metric) -> CurvatureBundle:
    chart = g.chart
    n = g.n
    ginv = g.inv
    act = chart.active
    dg = {}
    for c in act:
        for a in range(n):
            for b in range(a, n):
                v = chart.d(g.comps[a, b], c)
                if v:
                    dg[c, a, b] = v
                    dg[c, b, a] = v

    def dgv(c, a, b):
        return dg.get((c, a, b))

    # first kind: Gamma_{c,ab} = (d_a g_bc + d_b g_ac - d_c g_ab)/2
    first = zeros(chart, 3)
    half = chart.ring.const(Fraction(1, 2))
    for c in range(n):
        for a in range(n):
            for b in range(a, n):
                total = None
                for term, sign in ((dgv(a, b, c), 1), (dgv(b, a, c), 1), (dgv(c, a, b), -1)):
                    if term is not None:
                        total = (term if sign > 0 else -term) if total is None else (
                            total + term if sign > 0 else total - term
                        )
                if total is not None and total:
                    total = total * half
                    first[c, a, b] = total
                    first[c, b, a] = total
    gamma = zeros(chart, 3)
    for k in range(n):
        for a in range(n):
            for b in range(a, n):
                total = chart.zero()
                for c in range(n):
                    if ginv[k, c] and first[c, a, b]:
                        total = total + ginv[k, c] * first[c, a, b]
                gamma[k, a, b] = total
                gamma[k, b, a] = total
    # R^a_{bcd} = d_c G^a_{db} - d_d G^a_{cb} + G^a_{ce} G^e_{db} - G^a_{de} G^e_{cb}
    riem = zeros(chart, 4)
    for a in range(n):
        for b in range(n):
            for c in range(n):
                for d in range(c + 1, n):
                    total = chart.d(gamma[a, d, b], c) - chart.d(gamma[a, c, b], d)
                    for e in range(n):
                        if gamma[a, c, e] and gamma[e, d, b]:
                            total = total + gamma[a, c, e] * gamma[e, d, b]
                        if gamma[a, d, e] and gamma[e, c, b]:
                            total = total - gamma[a, d, e] * gamma[e, c, b]
                    riem[a, b, c, d] = total
                    riem[a, b, d, c] = -total
    ric = zeros(chart, 2)
    for b in range(n):
        for d in range(b, n):
            total = chart.zero()
            for a in range(n):
                if riem[a, b, a, d]:
                    total = total + riem[a, b, a, d]
            ric[b, d] = total
            ric[d, b] = total
    scal = chart.zero()
    for b in range(n):
        for d in range(n):
            if ginv[b, d] and ric[b, d]:
                scal = scal + ginv[b, d] * ric[b, d]
    return CurvatureBundle(gamma, riem, ric, scal, g)


# ---------------------------------------------------------------------------
# covariant derivative, divergence, raising and lowering


def covariant_derivative(t: ChartTensor, g: Metric) -> ChartTensor:
    """(D t) with the derivative index first: kinds 'd' + t.kinds."""
    chart = g.chart
    n = g.n
    gamma = g.curvature.christoffel
    rank = t.rank
    out = zeros(chart, rank + 1)
    for e in range(n):
        for idx in np.ndindex((n,) * rank):
            total = chart.d(t.comps[idx], e)
            for slot, kind in enumerate(t.kinds):
                a = idx[slot]
                for f in range(n):
                    if kind == "d":
                        coeff = gamma[f, e, a]
                        if coeff:
                            other = t.comps[idx[:slot] + (f,) + idx[slot + 1:]]
                            if other:
                                total = total - coeff * other
                    else:
                        coeff = gamma[a, e, f]
                        if coeff:
                            other = t.comps[idx[:slot] + (f,) + idx[slot + 1:]]
                            if other:
                                total = total + coeff * other
            out[(e,) + idx] = total
    return ChartTensor(chart, "d" + t.kinds, out)


def raise_index(t: ChartTensor, slot: int, g: Metric) -> ChartTensor:
    if t.kinds[slot] != "d":
        raise MalformedInputError(f"slot {slot} is already contravariant")
    return _move_index(t, slot, g.inv, "u")


def lower_index(t: ChartTensor, slot: int, g: Metric) -> ChartTensor:
    if t.kinds[slot] != "u":
        raise MalformedInputError(f"slot {slot} is already covariant")
    return _move_index(t, slot, g.comps, "d")


def _move_index(t, slot, mat, new_kind):
    chart = t.chart
    n = chart.n
    out = zeros(chart, t.rank)
    for idx in np.ndindex(out.shape):
        a = idx[slot]
        total = chart.zero()
        for b in range(n):
            if mat[a, b]:
                other = t.comps[idx[:slot] + (b,) + idx[slot + 1:]]
                if other:
                    total = total + mat[a, b] * other
        out[idx] = total
    kinds = t.kinds[:slot] + new_kind + t.kinds[slot + 1:]
    return ChartTensor(chart, kinds, out)


def divergence(t: ChartTensor, slot: int, g: Metric) -> ChartTensor:
    """Contract a covariant slot of t with the derivative: g^{ed} D_e t_{..d..}."""
    if t.kinds[slot] != "d":
        raise MalformedInputError("divergence needs a covariant slot")
    chart = g.chart
    n = g.n
    gamma = g.curvature.christoffel
    up = raise_index(t, slot, g)
    # Gamma^d_{dh}
    trace_gamma = [sum((gamma[d, d, h] for d in range(n)), chart.zero()) for h in range(n)]
    rest_shape = (n,) * (t.rank - 1)
    out = zeros(chart, t.rank - 1)
    for rest in np.ndindex(rest_shape):

        def at(d, rest=rest):
            return rest[:slot] + (d,) + rest[slot:]

        total = chart.zero()
        for d in chart.active:
            v = up.comps[at(d)]
            if v:
                total = total + chart.d(v, d)
        for h in range(n):
            v = up.comps[at(h)]
            if v and trace_gamma[h]:
                total = total + trace_gamma[h] * v
        for pos, kind in enumerate(t.kinds):
            if pos == slot:
                continue
            rpos = pos if pos < slot else pos - 1
            a = rest[rpos]
            for d in range(n):
                for h in range(n):
                    coeff = gamma[h, d, a] if kind == "d" else gamma[a, d, h]
                    if not coeff:
                        continue
                    idx = list(at(d))
                    idx[pos] = h
                    v = up.comps[tuple(idx)]
                    if v:
                        total = total - coeff * v if kind == "d" else total + coeff * v
        out[rest] = total
    kinds = t.kinds[:slot] + t.kinds[slot + 1:]
    return ChartTensor(chart, kinds, out)


def trace(t: ChartTensor, g: Metric) -> RationalFunction:
    """g-trace of a (0,2) tensor."""
    total = g.chart.zero()
    for i in range(g.n):
        for j in range(g.n):
            if g.inv[i, j] and t.comps[i, j]:
                total = total + g.inv[i, j] * t.comps[i, j]
    return total


# ---------------------------------------------------------------------------
# exterior calculus


def exterior_derivative(form: ChartTensor) -> ChartTensor:
    """d of a 0-, 1- or 2-form given as an antisymmetric covariant tensor."""
    chart = form.chart
    n = chart.n
    if form.rank == 1:
        out = zeros(chart, 2)
        for a in range(n):
            for b in range(a + 1, n):
                v = chart.d(form.comps[b], a) - chart.d(form.comps[a], b)
                out[a, b] = v
                out[b, a] = -v
        return ChartTensor(chart, "dd", out, "antisymmetric")
    if form.rank == 2:
        out = zeros(chart, 3)
        for a, b, c in itertools.combinations(range(n), 3):
            v = chart.d(form.comps[b, c], a) + chart.d(form.comps[c, a], b) + chart.d(form.comps[a, b], c)
            for perm, sign in _perms3((a, b, c)):
                out[perm] = v if sign > 0 else -v
        return ChartTensor(chart, "ddd", out, "antisymmetric")
    raise MalformedInputError("exterior_derivative supports 1- and 2-forms")


def differential(chart: Chart, f: RationalFunction) -> ChartTensor:
    out = zeros(chart, 1)
    for a in range(chart.n):
        out[a] = chart.d(f, a)
    return ChartTensor(chart, "d", out)


def _perms3(t):
    a, b, c = t
    return [((a, b, c), 1), ((b, c, a), 1), ((c, a, b), 1), ((b, a, c), -1), ((a, c, b), -1), ((c, b, a), -1)]


def wedge(alpha: ChartTensor, beta: ChartTensor) -> ChartTensor:
    """Wedge product of 1-forms, or of a 1-form with a 2-form."""
    chart = alpha.chart
    n = chart.n
    if alpha.rank == 1 and beta.rank == 1:
        out = zeros(chart, 2)
        for a in range(n):
            for b in range(n):
                if a != b:
                    out[a, b] = alpha.comps[a] * beta.comps[b] - alpha.comps[b] * beta.comps[a]
        return ChartTensor(chart, "dd", out, "antisymmetric")
    if alpha.rank == 1 and beta.rank == 2:
        out = zeros(chart, 3)
        for a, b, c in itertools.combinations(range(n), 3):
            v = alpha.comps[a] * beta.comps[b, c] + alpha.comps[b] * beta.comps[c, a] + alpha.comps[c] * beta.comps[a, b]
            for perm, sign in _perms3((a, b, c)):
                out[perm] = v if sign > 0 else -v
        return ChartTensor(chart, "ddd", out, "antisymmetric")
    raise MalformedInputError("wedge supports 1^1 and 1^2 forms")


def interior(vector: Sequence, form: ChartTensor) -> ChartTensor:
    """iota_K form for a constant-or-rational vector field given by components."""
    chart = form.chart
    n = chart.n
    out = zeros(chart, form.rank - 1)
    for rest in np.ndindex((n,) * (form.rank - 1)):
        total = chart.zero()
        for a in range(n):
            k = vector[a]
            if k:
                total = total + form.comps[(a,) + rest] * k
        out[rest] = total
    return ChartTensor(chart, form.kinds[1:], out)


def pfaffian(omega: ChartTensor) -> RationalFunction:
    w = omega.comps
    return w[0, 1] * w[2, 3] - w[0, 2] * w[1, 3] + w[0, 3] * w[1, 2]


def endomorphism_from_form(g: Metric, omega: ChartTensor) -> ChartTensor:
    """The J with omega = g(J., .): J^c_a = -g^{cb} omega_{ba}... solved exactly."""
    # omega_ab = J^c_a g_cb  =>  J^c_a = omega_ab g^{bc}
    chart = g.chart
    n = g.n
    out = zeros(chart, 2)
    for c in range(n):
        for a in range(n):
            total = chart.zero()
            for b in range(n):
                if omega.comps[a, b] and g.inv[b, c]:
                    total = total + omega.comps[a, b] * g.inv[b, c]
            out[c, a] = total
    return ChartTensor(chart, "ud", out)


def form_from_endomorphism(g: Metric, J: ChartTensor) -> ChartTensor:
    """omega(X, Y) = g(JX, Y): omega_ab = J^c_a g_cb."""
    chart = g.chart
    n = g.n
    out = zeros(chart, 2)
    for a in range(n):
        for b in range(n):
            total = chart.zero()
            for c in range(n):
                if J.comps[c, a] and g.comps[c, b]:
                    total = total + J.comps[c, a] * g.comps[c, b]
            out[a, b] = total
    return ChartTensor(chart, "dd", out)


def compose(J: ChartTensor, K: ChartTensor) -> ChartTensor:
    """(J o K)^a_b = J^a_c K^c_b."""
    chart = J.chart
    n = chart.n
    out = zeros(chart, 2)
    for a in range(n):
        for b in range(n):
            total = chart.zero()
            for c in range(n):
                if J.comps[a, c] and K.comps[c, b]:
                    total = total + J.comps[a, c] * K.comps[c, b]
            out[a, b] = total
    return ChartTensor(chart, "ud", out)


def identity(chart: Chart) -> ChartTensor:
    out = zeros(chart, 2)
    for a in range(chart.n):
        out[a, a] = chart.ring.one()
    return ChartTensor(chart, "ud", out)


def apply_to_covector(J: ChartTensor, alpha: ChartTensor) -> ChartTensor:
    """J alpha = -alpha o J."""
    chart = J.chart
    out = zeros(chart, 1)
    for b in range(chart.n):
        total = chart.zero()
        for c in range(chart.n):
            if alpha.comps[c] and J.comps[c, b]:
                total = total - alpha.comps[c] * J.comps[c, b]
        out[b] = total
    return ChartTensor(chart, "d", out)


def bilinear_with(g: Metric, J: ChartTensor) -> ChartTensor:
    """The symmetric or skew form g(J., .) for an endomorphism J."""
    return form_from_endomorphism(g, J)


# ---------------------------------------------------------------------------
# Weyl tensor, Hodge star, Bach tensor


def weyl(g: Metric) -> ChartTensor:
    curv = g.curvature
    rl = curv.riemann_lowered
    P = curv.schouten
    gg = g.comps
    n = g.n
    out = zeros(g.chart, 4)
    for a, b, c, d in itertools.product(range(n), repeat=4):
        if a >= b or c >= d:
            continue
        v = rl[a, b, c, d] - (P[a, c] * gg[b, d] + P[b, d] * gg[a, c] - P[a, d] * gg[b, c] - P[b, c] * gg[a, d])
        out[a, b, c, d] = v
        out[b, a, c, d] = -v
        out[a, b, d, c] = -v
        out[b, a, d, c] = v
    return ChartTensor(g.chart, "dddd", out)


def _require_dim4(g: Metric):
    if g.n != 4:
        raise MalformedInputError(f"operation needs a 4-dimensional chart, got n={g.n}")


def _epsilon_mixed(g: Metric) -> np.ndarray:
    """eps_{ab}^{cd} built from the oriented volume form."""
    vol = g.volume
    n = g.n
    eps = zeros(g.chart, 4)
    for perm in itertools.permutations(range(n)):
        eps[perm] = vol * _perm_sign(perm)
    # raise the last two indices
    out = zeros(g.chart, 4)
    ginv = g.inv
    for a, b in itertools.permutations(range(n), 2):
        for c in range(n):
            for d in range(n):
                total = g.chart.zero()
                for e in range(n):
                    if not ginv[e, c]:
                        continue
                    for f in range(n):
                        if ginv[f, d] and eps[a, b, e, f]:
                            total = total + eps[a, b, e, f] * ginv[e, c] * ginv[f, d]
                out[a, b, c, d] = total
    return out


def _perm_sign(perm) -> int:
    sign = 1
    p = list(perm)
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


def hodge_star(beta: ChartTensor, g: Metric) -> ChartTensor:
    """Hodge star of a 2-form: (*beta)_ab = 1/2 eps_ab^cd beta_cd."""
    _require_dim4(g)
    eps = _epsilon_mixed(g)
    n = g.n
    out = zeros(g.chart, 2)
    for a in range(n):
        for b in range(n):
            total = g.chart.zero()
            for c in range(n):
                for d in range(c + 1, n):
                    if eps[a, b, c, d] and beta.comps[c, d]:
                        total = total + eps[a, b, c, d] * beta.comps[c, d]
            out[a, b] = total
    return ChartTensor(g.chart, "dd", out, "antisymmetric")


def _star_left(W: np.ndarray, eps: np.ndarray, chart: Chart) -> np.ndarray:
    """(*W)_abcd = 1/2 eps_ab^ef W_efcd."""
    n = chart.n
    out = zeros(chart, 4)
    for a, b, c, d in itertools.product(range(n), repeat=4):
        if a >= b or c >= d:
            continue
        total = chart.zero()
        for e in range(n):
            for f in range(e + 1, n):
                if eps[a, b, e, f] and W[e, f, c, d]:
                    total = total + eps[a, b, e, f] * W[e, f, c, d]
        out[a, b, c, d] = total
        out[b, a, c, d] = -total
        out[a, b, d, c] = -total
        out[b, a, d, c] = total
    return out


@dataclass
class WeylSplit:
    wplus: ChartTensor
    wminus: ChartTensor
    degenerate_plus: bool
    degenerate_minus: bool
    discriminant_plus: RationalFunction
    discriminant_minus: RationalFunction


def weyl_split(g: Metric) -> WeylSplit:
    _require_dim4(g)
    W = weyl(g)
    eps = _epsilon_mixed(g)
    star_w = _star_left(W.comps, eps, g.chart)
    half = g.chart.ring.const(Fraction(1, 2))
    wp = (W.comps + star_w) * half
    wm = (W.comps - star_w) * half
    disc_p = _spectrum_discriminant(wp, g)
    disc_m = _spectrum_discriminant(wm, g)
    return WeylSplit(
        ChartTensor(g.chart, "dddd", wp),
        ChartTensor(g.chart, "dddd", wm),
        disc_p.is_zero(),
        disc_m.is_zero(),
        disc_p,
        disc_m,
    )


def _pairs(n):
    return [(a, b) for a in range(n) for b in range(a + 1, n)]


def _spectrum_discriminant(Wc: np.ndarray, g: Metric) -> RationalFunction:
    """Discriminant of the characteristic cubic of W on its 3-dim support.

    W acts on 2-forms by beta -> 1/2 W_ab^cd beta_cd; with zero trace the
    cubic is t^3 + e2 t - e3 where e2 = -tr(M^2)/2 and e3 = tr(M^3)/3.
    """
    n = g.n
    ginv = g.inv
    pairs = _pairs(n)
    chart = g.chart
    # W_ab^cd
    raised = {}
    for (a, b) in pairs:
        for (c, d) in pairs:
            total = chart.zero()
            for e in range(n):
                for f in range(n):
                    if e == f or not Wc[a, b, e, f]:
                        continue
                    if ginv[e, c] and ginv[f, d]:
                        total = total + Wc[a, b, e, f] * ginv[e, c] * ginv[f, d]
            raised[(a, b), (c, d)] = total
    M = [[raised[I, J] for J in pairs] for I in pairs]
    M2 = _matmul(M, M)
    tr2 = sum((M2[i][i] for i in range(len(pairs))), chart.zero())
    tr3 = chart.zero()
    for i in range(len(pairs)):
        for k in range(len(pairs)):
            if M2[i][k] and M[k][i]:
                tr3 = tr3 + M2[i][k] * M[k][i]

    e2 = tr2 * Fraction(-1, 2)
    e3 = tr3 * Fraction(1, 3)
    return e2 ** 3 * (-4) - e3 * e3 * 27


def _matmul(a, b):
    n = len(a)
    m = len(b[0])
    ring_zero = a[0][0].ring.zero()
    out = [[ring_zero] * m for _ in range(n)]
    for i in range(n):
        for k in range(len(b)):
            if not a[i][k]:
                continue
            for j in range(m):
                if b[k][j]:
                    out[i][j] = out[i][j] + a[i][k] * b[k][j]
    return out


def weyl_action(W: np.ndarray, b: np.ndarray, g: Metric) -> np.ndarray:
    """(W * b)_{ac}... = W_{a c b d} b^{cd}, the standard contraction on symmetric b."""
    n = g.n
    ginv = g.inv
    chart = g.chart
    bup = zeros(chart, 2)
    for c in range(n):
        for d in range(n):
            total = chart.zero()
            for e in range(n):
                for f in range(n):
                    if ginv[c, e] and ginv[d, f] and b[e, f]:
                        total = total + ginv[c, e] * ginv[d, f] * b[e, f]
            bup[c, d] = total
    out = zeros(chart, 2)
    for a in range(n):
        for bb in range(a, n):
            total = chart.zero()
            for c in range(n):
                for d in range(n):
                    if W[a, c, bb, d] and bup[c, d]:
                        total = total + W[a, c, bb, d] * bup[c, d]
            out[a, bb] = total
            out[bb, a] = total
    return out


def double_divergence(W: np.ndarray, g: Metric) -> np.ndarray:
    """D^c D^d W_{acbd}, symmetrized in (a, b)."""
    Wt = ChartTensor(g.chart, "dddd", W)
    div1 = divergence(Wt, 3, g)  # (a, c, b)
    div2 = divergence(div1, 1, g)  # (a, b)
    out = div2.comps
    n = g.n
    half = Fraction(1, 2)
    sym = zeros(g.chart, 2)
    for a in range(n):
        for b in range(a, n):
            v = (out[a, b] + out[b, a]) * half
            sym[a, b] = v
            sym[b, a] = v
    return sym


def bach(g: Metric, cross_check: bool = True) -> ChartTensor:
    """Bach tensor D^c D^d W_acbd + 1/2 W_acbd Ric0^cd.

    With ``cross_check`` the half-Weyl expressions
    2 D^c D^d W^pm_acbd + W^pm_acbd Ric0^cd are evaluated too and must agree.
    """
    _require_dim4(g)
    W = weyl(g).comps
    ric0 = g.curvature.ricci_tracefree

    B = double_divergence(W, g) + weyl_action(W, ric0, g) * Fraction(1, 2)
    if cross_check:
        split = weyl_split(g)
        for part, label in ((split.wplus.comps, "+"), (split.wminus.comps, "-")):
            Bpm = double_divergence(part, g) * 2 + weyl_action(part, ric0, g)
            diff = B - Bpm
            if any(c for c in diff.flat):
                raise InconsistencyError(f"Bach tensor from W{label} disagrees with the full-Weyl expression")
    result = ChartTensor(g.chart, "dd", B, "symmetric")
    return result


def bach_schouten(g: Metric) -> ChartTensor:
    """Bach tensor through the Cotton tensor: D^c C_abc + P^cd W_acbd.

    Independent of :func:`bach` apart from the Christoffel symbols; used to
    certify the Weyl-divergence route.
    """
    _require_dim4(g)
    P = ChartTensor(g.chart, "dd", g.curvature.schouten)
    DP = covariant_derivative(P, g)  # (e, a, b) = D_e P_ab
    n = g.n
    chart = g.chart
    # Cotton C_abc = D_c P_ab - D_b P_ac
    cotton = zeros(chart, 3)
    for a, b, c in itertools.product(range(n), repeat=3):
        cotton[a, b, c] = DP.comps[c, a, b] - DP.comps[b, a, c]
    divC = divergence(ChartTensor(chart, "ddd", cotton), 2, g).comps
    W = weyl(g).comps
    B = divC + weyl_action(W, g.curvature.schouten, g)
    return ChartTensor(chart, "dd", B, "symmetric")


# ---------------------------------------------------------------------------
# hermitian structures


def lee_form(g: Metric, J: ChartTensor, verify: bool = True) -> ChartTensor:
    """theta = -1/2 J delta omega with omega = g(J., .); then d omega = -2 theta ^ omega."""
    _check_hermitian(g, J)
    omega = form_from_endomorphism(g, J)
    # delta omega = -div omega (contracting the derivative with the first slot)
    div = divergence(omega, 0, g)
    delta = div.map(lambda c: -c)
    theta = apply_to_covector(J, delta).map(lambda c: c * Fraction(-1, 2))
    if verify:
        lhs = exterior_derivative(omega)
        rhs = wedge(theta, omega).map(lambda c: c * -2)
        if lhs != rhs:
            raise InconsistencyError("Lee form does not satisfy d omega = -2 theta ^ omega")
    return theta


def _check_hermitian(g: Metric, J: ChartTensor):
    sq = compose(J, J)
    minus_id = identity(g.chart).map(lambda c: -c)
    if sq != minus_id:
        raise MalformedInputError("J does not square to -Id")
    n = g.n
    for a in range(n):
        for b in range(a, n):
            total = g.chart.zero()
            for c in range(n):
                for d in range(n):
                    if J.comps[c, a] and J.comps[d, b] and g.comps[c, d]:
                        total = total + J.comps[c, a] * J.comps[d, b] * g.comps[c, d]
            if total != g.comps[a, b]:
                raise MalformedInputError("g is not J-invariant; (g, J) is not hermitian")


def nijenhuis(J: ChartTensor) -> ChartTensor:
    """N^a_{bc} = J^d_b d_d J^a_c - J^d_c d_d J^a_b - J^a_d (d_b J^d_c - d_c J^d_b)."""
    chart = J.chart
    n = chart.n
    dJ = {}
    for d in chart.active:
        for a in range(n):
            for c in range(n):
                v = chart.d(J.comps[a, c], d)
                if v:
                    dJ[d, a, c] = v
    zero = chart.zero()
    out = zeros(chart, 3)
    for a in range(n):
        for b in range(n):
            for c in range(b + 1, n):
                total = zero
                for d in range(n):
                    if J.comps[d, b] and (d, a, c) in dJ:
                        total = total + J.comps[d, b] * dJ[d, a, c]
                    if J.comps[d, c] and (d, a, b) in dJ:
                        total = total - J.comps[d, c] * dJ[d, a, b]
                    if J.comps[a, d]:
                        inner = dJ.get((b, d, c), zero) - dJ.get((c, d, b), zero)
                        if inner:
                            total = total - J.comps[a, d] * inner
                out[a, b, c] = total
                out[a, c, b] = -total
    return ChartTensor(chart, "udd", out)


def killing_vector_residual(g: Metric, K: Sequence) -> ChartTensor:
    """Lie derivative L_K g; components of K may be rational functions."""
    chart = g.chart
    n = g.n
    comps = [k if isinstance(k, RationalFunction) else chart.ring.const(k) for k in K]
    out = zeros(chart, 2)
    for a in range(n):
        for b in range(a, n):
            total = chart.zero()
            for c in range(n):
                if comps[c]:
                    total = total + comps[c] * chart.d(g.comps[a, b], c)
                dak = chart.d(comps[c], a)
                if dak and g.comps[c, b]:
                    total = total + g.comps[c, b] * dak
                dbk = chart.d(comps[c], b)
                if dbk and g.comps[a, c]:
                    total = total + g.comps[a, c] * dbk
            out[a, b] = total
            out[b, a] = total
    return ChartTensor(chart, "dd", out, "symmetric")


def killing_tensor_residual(g: Metric, S: ChartTensor) -> ChartTensor:
    """Symmetrized covariant derivative D_(a S_bc) (sum over the three cyclic terms)."""
    DS = covariant_derivative(S, g)
    chart = g.chart
    n = g.n
    out = zeros(chart, 3)
    for a, b, c in itertools.combinations_with_replacement(range(n), 3):
        v = DS.comps[a, b, c] + DS.comps[b, c, a] + DS.comps[c, a, b]
        for perm in set(itertools.permutations((a, b, c))):
            out[perm] = v
    return ChartTensor(chart, "ddd", out, "symmetric")


def gradient_killing_field(g: Metric, J: ChartTensor, s: RationalFunction) -> list:
    """Components of J grad_g s."""
    chart = g.chart
    n = g.n
    grad = []
    for a in range(n):
        total = chart.zero()
        for b in range(n):
            if g.inv[a, b]:
                db = chart.d(s, b)
                if db:
                    total = total + g.inv[a, b] * db
        grad.append(total)
    out = []
    for a in range(n):
        total = chart.zero()
        for b in range(n):
            if J.comps[a, b] and grad[b]:
                total = total + J.comps[a, b] * grad[b]
        out.append(total)
    return out


def hamiltonian_form_residual(g: Metric, J: ChartTensor, phi: ChartTensor) -> ChartTensor:
    """D_X phi - 1/2 (d sigma ^ J X^flat - J d sigma ^ X^flat), sigma = g(phi, omega).

    Returned with kinds (e, a, b): X = d_e.
    """
    chart = g.chart
    n = g.n
    _require_j_invariant(J, phi)
    omega = form_from_endomorphism(g, J)
    omega_up = raise_index(raise_index(omega, 0, g), 1, g)
    sigma = chart.zero()
    for a in range(n):
        for b in range(n):
            if phi.comps[a, b] and omega_up.comps[a, b]:
                sigma = sigma + phi.comps[a, b] * omega_up.comps[a, b]

    sigma = sigma * Fraction(1, 2)
    dsigma = differential(chart, sigma)
    Jdsigma = apply_to_covector(J, dsigma)
    Dphi = covariant_derivative(phi, g)
    out = zeros(chart, 3)
    for e in range(n):
        xflat = ChartTensor(chart, "d", np.array([g.comps[e, b] for b in range(n)], dtype=object))
        jx = ChartTensor(chart, "d", np.array([
            sum((J.comps[c, e] * g.comps[c, b] for c in range(n) if J.comps[c, e] and g.comps[c, b]), chart.zero())
            for b in range(n)
        ], dtype=object))
        rhs = wedge(dsigma, jx) - wedge(Jdsigma, xflat)
        for a in range(n):
            for b in range(n):
                out[e, a, b] = Dphi.comps[e, a, b] - rhs.comps[a, b] * Fraction(1, 2)
    return ChartTensor(chart, "ddd", out)


def _require_j_invariant(J: ChartTensor, phi: ChartTensor):
    chart = J.chart
    n = chart.n
    for a in range(n):
        for b in range(a + 1, n):
            total = chart.zero()
            for c in range(n):
                for d in range(n):
                    if J.comps[c, a] and J.comps[d, b] and phi.comps[c, d]:
                        total = total + J.comps[c, a] * J.comps[d, b] * phi.comps[c, d]
            if total != phi.comps[a, b]:
                raise MalformedInputError("2-form is not J-invariant")
