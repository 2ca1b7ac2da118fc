"""Explicit ambitoric and Calabi-type Kähler metrics.

A regular ambitoric structure is fixed by a quadratic ``q`` and two
functions ``A``, ``B`` of one variable (here quartics). On the chart
``(x, y, t1, t2)`` write, for a point ``w`` of the line,

    Theta_w = w**2 dtau0 + 2 w dtau1 + dtau2

where ``dtau`` ranges over the plane orthogonal to ``q``. That plane is
parametrized by ``dtau = dt1 * e1 + dt2 * e2`` for a basis ``e1, e2`` of
quadratics orthogonal to ``q``; then ``Theta_w = e1(w) dt1 + e2(w) dt2``.

    g0 = dx^2/A(x) + dy^2/B(y) + (A(x) Theta_y^2 + B(y) Theta_x^2) / D^2
    omega+ = (dx ^ Theta_y + dy ^ Theta_x) / q(x,y)^2
    omega- = (dx ^ Theta_y - dy ^ Theta_x) / (x - y)^2

with ``D = (x - y) q(x, y)``. The Kähler metrics are ``g+ = g0 / f`` and
``g- = f g0`` where ``f = q(x,y)/(x - y)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .binary_forms import BinaryForm, QuadraticForm, inner_product, poisson_bracket
from .errors import DegenerateInputError, InconsistencyError, MalformedInputError
from .exact_algebra import R, RationalFunction, Ring, ring
from .tensors import (
    Chart,
    ChartTensor,
    Metric,
    differential,
    endomorphism_from_form,
    exterior_derivative,
    interior,
    pfaffian,
    zeros,
)

NAMED_Q = {
    "parabolic": QuadraticForm(0, 0, 1),
    "hyperbolic": QuadraticForm(0, 1, 0),
    "elliptic": QuadraticForm(1, 0, 1),
}
FORM_TYPES = ("parabolic", "hyperbolic", "elliptic", "general")
CHART_COORDS = ("x", "y", "t1", "t2")
CALABI_COORDS = ("z", "t", "u", "v")


def quartic(coeffs) -> BinaryForm:
    """Quartic from descending coefficients a0..a4 (a0 multiplies z^4)."""
    coeffs = list(coeffs)
    if len(coeffs) != 5:
        raise MalformedInputError(f"a quartic needs 5 coefficients, got {len(coeffs)}")
    return BinaryForm.from_descending(coeffs, 4)


@dataclass(frozen=True)
class AmbitoricSpec:
    form_type: str
    A: BinaryForm
    B: BinaryForm
    q: Optional[QuadraticForm] = None
    p: Optional[QuadraticForm] = None

    def __post_init__(self):
        if self.form_type not in FORM_TYPES:
            raise MalformedInputError(f"unknown type {self.form_type!r}; expected one of {', '.join(FORM_TYPES)}")
        for name in ("A", "B"):
            form = getattr(self, name)
            if not isinstance(form, BinaryForm):
                form = quartic(form)
                object.__setattr__(self, name, form)
            if form.degree > 4:
                raise MalformedInputError(f"{name} has degree {form.degree} > 4")
            if form.m != 4:
                object.__setattr__(self, name, form.with_bound(4))
        if self.form_type == "general":
            if self.q is None:
                raise MalformedInputError("type general requires q")
            if self.q.is_zero():
                raise DegenerateInputError("q is the zero quadratic")
        else:
            canonical = NAMED_Q[self.form_type]
            if self.q is not None and self.q != canonical:
                raise MalformedInputError(f"type {self.form_type} has fixed q = {canonical.triple}")
            object.__setattr__(self, "q", canonical)
        if self.A.is_zero() and self.B.is_zero():
            raise DegenerateInputError("A and B are both identically zero")
        if self.p is not None:
            if self.p.is_zero():
                raise MalformedInputError("p must be a nonzero quadratic")
            if inner_product(self.p, self.q) != 0:
                raise MalformedInputError("p is not orthogonal to q: <p,q> = " + str(inner_product(self.p, self.q)))

    def a(self) -> tuple:
        """Descending coefficients a0..a4."""
        return self.A.descending()

    def b(self) -> tuple:
        return self.B.descending()


def orthogonal_basis(q: QuadraticForm) -> tuple:
    """Basis (e1, e2) of quadratics orthogonal to q.

    The named normal forms get 1, z (parabolic), 1, z^2 (hyperbolic) and
    2z, z^2 - 1 (elliptic); any q proportional to one of them gets the same
    basis.
    """
    q0, q1, q2 = q.triple
    if q1 != 0:
        # tau1 = (q2 tau0 + q0 tau2) / (2 q1)
        e1 = QuadraticForm(0, q0 / (2 * q1), 1)
        e2 = QuadraticForm(1, q2 / (2 * q1), 0)
    elif q0 == 0:
        e1 = QuadraticForm(0, 0, 1)
        e2 = QuadraticForm(0, Fraction(1, 2), 0)
    elif q2 != 0:
        e1 = QuadraticForm(0, 1, 0)
        e2 = QuadraticForm(1, 0, -q2 / q0)
    else:
        e1 = QuadraticForm(1, 0, 0)
        e2 = QuadraticForm(0, Fraction(1, 2), 0)
    for e in (e1, e2):
        if inner_product(e, q) != 0:
            raise InconsistencyError("basis element not orthogonal to q")
    return e1, e2


def _solve_in_basis(target: QuadraticForm, basis: tuple) -> tuple:
    """Coordinates (k1, k2) with k1 e1 + k2 e2 = target."""
    e1, e2 = basis
    rows = list(zip(e1.triple, e2.triple, target.triple))
    for i in range(3):
        for j in range(i + 1, 3):
            a, b, c = rows[i]
            d, e, f = rows[j]
            det = a * e - b * d
            if det:
                k1 = (c * e - b * f) / det
                k2 = (a * f - c * d) / det
                if e1.scale(k1) + e2.scale(k2) != target:
                    raise MalformedInputError("quadratic is not orthogonal to q")
                return k1, k2
    raise InconsistencyError("degenerate orthogonal basis")


@dataclass
class AmbitoricModel:
    spec: AmbitoricSpec
    chart: Chart
    basis: tuple
    g0: Metric
    gplus: Metric
    gminus: Metric
    omegaplus: ChartTensor
    omegaminus: ChartTensor
    Jplus: ChartTensor
    Jminus: ChartTensor
    f: RationalFunction
    dc: dict = field(default_factory=dict)

    def metric(self, sign: str) -> Metric:
        return {"+": self.gplus, "-": self.gminus, "0": self.g0}[sign]

    def J(self, sign: str) -> ChartTensor:
        return {"+": self.Jplus, "-": self.Jminus}[sign]

    def omega(self, sign: str) -> ChartTensor:
        return {"+": self.omegaplus, "-": self.omegaminus}[sign]

    @property
    def q_xy(self) -> RationalFunction:
        return self.spec.q.polarize("x", "y", self.chart.ring)


def _theta(basis, w: RationalFunction, ring_: Ring) -> list:
    """Components of Theta_w on (x, y, t1, t2)."""
    e1, e2 = basis
    z = ring_.zero()
    return [z, z, e1.q0 * w * w + 2 * e1.q1 * w + e1.q2, e2.q0 * w * w + 2 * e2.q1 * w + e2.q2]


def _sym(u, v, chart):
    out = zeros(chart, 2)
    for i in range(chart.n):
        for j in range(chart.n):
            if u[i] and v[j]:
                out[i, j] = u[i] * v[j]
    return out


def _wedge(u, v, chart):
    out = zeros(chart, 2)
    for i in range(chart.n):
        for j in range(chart.n):
            t = chart.zero()
            if u[i] and v[j]:
                t = u[i] * v[j]
            if u[j] and v[i]:
                t = t - u[j] * v[i]
            out[i, j] = t
    return out


def build(spec: AmbitoricSpec, ring_: Ring = R) -> AmbitoricModel:
    """Assemble g0, g+-, omega+-, J+- and f from (q, A, B)."""
    if spec.A.is_zero() or spec.B.is_zero():
        raise DegenerateInputError("A and B must both be nonzero: the metric has 1/A(x) and 1/B(y) terms")
    chart0 = Chart(CHART_COORDS, ring_)
    x, y = ring_.var("x"), ring_.var("y")
    zero, one = ring_.zero(), ring_.one()
    q = spec.q
    qxy = q.polarize("x", "y", ring_)
    if qxy.is_zero():
        raise DegenerateInputError("q(x,y) vanishes identically")
    A = spec.A.as_function("x", ring_)
    B = spec.B.as_function("y", ring_)
    basis = orthogonal_basis(q)
    theta_x = _theta(basis, x, ring_)
    theta_y = _theta(basis, y, ring_)
    dx = [one, zero, zero, zero]
    dy = [zero, one, zero, zero]
    D = (x - y) * qxy
    D2 = D * D
    g0c = _sym(dx, dx, chart0) * A.inverse() + _sym(dy, dy, chart0) * B.inverse()
    g0c = g0c + _sym(theta_y, theta_y, chart0) * (A / D2) + _sym(theta_x, theta_x, chart0) * (B / D2)
    f = qxy / (x - y)
    wplus = (_wedge(dx, theta_y, chart0) + _wedge(dy, theta_x, chart0)) * (qxy * qxy).inverse()
    wminus = (_wedge(dx, theta_y, chart0) - _wedge(dy, theta_x, chart0)) * ((x - y) * (x - y)).inverse()

    g0 = Metric(chart0, g0c)
    if g0.det.is_zero():
        raise DegenerateInputError("g0 is degenerate: the orthogonal basis collapses on this chart")
    gplus_c = g0c * f.inverse()
    omegaplus0 = ChartTensor(chart0, "dd", wplus, "antisymmetric")
    orientation = _orientation(Metric(chart0, gplus_c), omegaplus0)
    chart = chart0.with_orientation(orientation)
    g0 = Metric(chart, g0c)
    gplus = Metric(chart, gplus_c)
    gminus = Metric(chart, g0c * f)
    omegaplus = ChartTensor(chart, "dd", wplus, "antisymmetric")
    omegaminus = ChartTensor(chart, "dd", wminus, "antisymmetric")
    Jplus = endomorphism_from_form(gplus, omegaplus)
    Jminus = endomorphism_from_form(gminus, omegaminus)
    dc = {
        ("+", "x"): [c * (A / D) for c in theta_y],
        ("+", "y"): [c * (B / D) for c in theta_x],
        ("-", "x"): [c * (A / D) for c in theta_y],
        ("-", "y"): [-c * (B / D) for c in theta_x],
    }
    return AmbitoricModel(spec, chart, basis, g0, gplus, gminus, omegaplus, omegaminus, Jplus, Jminus, f, dc)


def _orientation(g: Metric, omega: ChartTensor) -> int:
    """Orientation flag making omega^2/2 the volume form of g."""
    pf = pfaffian(omega)
    vol = g.volume  # canonical root with the default flag
    if pf == vol:
        return 1
    if pf == -vol:
        return -1
    raise InconsistencyError("Pfaffian of omega is not a square root of det g")


def dc_sign(model: AmbitoricModel, sign: str) -> int:
    """The constant s with dx o J = s d^c x and dy o J = s d^c y, checked exactly."""
    J = model.J(sign)
    found = None
    for k, name in enumerate(("x", "y")):
        comp = [J.comps[k, b] for b in range(4)]  # (dx_k o J)_b = J^k_b
        target = model.dc[sign, name]
        for s in (1, -1):
            if all(c == t * s for c, t in zip(comp, target)):
                if found not in (None, s):
                    raise InconsistencyError("d^c x and d^c y give different signs")
                found = s
                break
        else:
            raise InconsistencyError(f"J{sign}^*(d{name}) is not proportional to the displayed d^c{name}")
    return found


# ---------------------------------------------------------------------------
# momentum maps and symplectic potential


def killing_field(model: AmbitoricModel, tau: QuadraticForm) -> list:
    """Vector components (0, 0, k1, k2) of the field K with dtau(K) = tau."""
    k1, k2 = _solve_in_basis(tau, model.basis)
    r = model.chart.ring
    return [r.zero(), r.zero(), r.const(k1), r.const(k2)]


def momentum(model: AmbitoricModel, which: str, w: QuadraticForm = None, p: QuadraticForm = None, c=0):
    """Killing potential and its field.

    ``which="plus"``: mu = -w(x,y)/q(x,y) for K^[w], where dtau(K) = {q,w}/2.
    ``which="minus"``: mu = -(p(x,y) + c(x-y))/(x-y) for K^(p), dtau(K) = p.
    Returns (mu, K) and asserts d mu = -iota_K omega.
    """
    ring_ = model.chart.ring
    x, y = ring_.var("x"), ring_.var("y")
    q = model.spec.q
    if which == "plus":
        if w is None:
            raise MalformedInputError("momentum plus needs w")
        mu = -w.polarize("x", "y", ring_) / q.polarize("x", "y", ring_)
        tau = poisson_bracket(q, w).scale(Fraction(1, 2))
        omega = model.omegaplus
    elif which == "minus":
        if p is None:
            raise MalformedInputError("momentum minus needs p")
        if inner_product(p, q) != 0:
            raise MalformedInputError("p is not orthogonal to q")
        mu = -(p.polarize("x", "y", ring_) + (x - y) * Fraction(c)) / (x - y)
        tau = p
        omega = model.omegaminus
    else:
        raise MalformedInputError(f"which must be 'plus' or 'minus', got {which!r}")
    K = killing_field(model, tau)
    lhs = differential(model.chart, mu)
    rhs = interior(K, omega)
    if any(a != -b for a, b in zip(lhs.comps, rhs.comps)):
        raise InconsistencyError("d mu != -iota_K omega")
    return mu, K


def symplectic_potential(model: AmbitoricModel) -> ChartTensor:
    """chi = (xy dtau0 + (x+y) dtau1 + dtau2)/(x-y), with d chi = -omega-."""
    chart = model.chart
    ring_ = chart.ring
    out = zeros(chart, 1)
    denom = ring_.var("x") - ring_.var("y")
    for i, e in enumerate(model.basis):
        out[2 + i] = e.polarize("x", "y", ring_) / denom
    chi = ChartTensor(chart, "d", out)
    d = exterior_derivative(chi)
    if d != -model.omegaminus:
        raise InconsistencyError("d chi != -omega-")
    return chi


# ---------------------------------------------------------------------------
# Calabi type


@dataclass
class CalabiModel:
    V: BinaryForm
    k: Fraction
    chart: Chart
    gplus: Metric
    gminus: Metric
    omegaplus: ChartTensor
    omegaminus: ChartTensor
    Jplus: ChartTensor
    Jminus: ChartTensor
    alpha: ChartTensor
    omega_sigma: ChartTensor
    zbar: RationalFunction
    Vbar: RationalFunction


def calabi_potential(k, ring_: Ring = R) -> tuple:
    """(alpha, omega_Sigma) on (z, t, u, v) with d alpha = omega_Sigma.

    alpha = (u dv - v du) phi(u^2 + v^2); with rho(s) = (1 + k s/4)^-2 the
    condition is 2 (s phi)' = rho, solved by phi = 1 / (2 (1 + k s / 4)).
    """
    chart = Chart(CALABI_COORDS, ring_)
    u, v = ring_.var("u"), ring_.var("v")
    k = Fraction(k)
    s = u * u + v * v
    conf = 1 + s * (k / 4)
    rho = (conf * conf).inverse()
    phi = (conf * 2).inverse()
    alpha = zeros(chart, 1)
    alpha[2] = -v * phi
    alpha[3] = u * phi
    alpha_t = ChartTensor(chart, "d", alpha)
    omega_sigma = ChartTensor.from_entries(chart, "dd", {(2, 3): rho}, antisymmetric=True)
    if exterior_derivative(alpha_t) != omega_sigma:
        raise InconsistencyError("d alpha != omega_Sigma")
    return alpha_t, omega_sigma, rho


def build_calabi(V, k, ring_: Ring = R) -> CalabiModel:
    """g+ = z g_Sigma + z/V dz^2 + V/z (dt + alpha)^2, omega+ = z omega_Sigma + dz ^ (dt + alpha)."""
    if not isinstance(V, BinaryForm):
        V = quartic(V)
    if V.is_zero():
        raise DegenerateInputError("V is identically zero")
    k = Fraction(k)
    alpha, omega_sigma, rho = calabi_potential(k, ring_)
    chart0 = alpha.chart
    z = ring_.var("z")
    Vz = V.as_function("z", ring_)
    theta = [ring_.zero(), ring_.one(), alpha.comps[2], alpha.comps[3]]  # dt + alpha
    dz = [ring_.one(), ring_.zero(), ring_.zero(), ring_.zero()]
    gs = zeros(chart0, 2)
    gs[2, 2] = rho
    gs[3, 3] = rho
    gp = gs * z + _sym(dz, dz, chart0) * (z / Vz) + _sym(theta, theta, chart0) * (Vz / z)
    wp = omega_sigma.comps * z + _wedge(dz, theta, chart0)
    zbar = z.inverse()
    dzbar = [-(z * z).inverse(), ring_.zero(), ring_.zero(), ring_.zero()]
    wm = omega_sigma.comps * zbar + _wedge(dzbar, theta, chart0)
    gm = gp * (z * z).inverse()
    orientation = _orientation(Metric(chart0, gp), ChartTensor(chart0, "dd", wp))
    chart = chart0.with_orientation(orientation)
    gplus = Metric(chart, gp)
    gminus = Metric(chart, gm)
    omegaplus = ChartTensor(chart, "dd", wp, "antisymmetric")
    omegaminus = ChartTensor(chart, "dd", wm, "antisymmetric")
    Jplus = endomorphism_from_form(gplus, omegaplus)
    Jminus = endomorphism_from_form(gminus, omegaminus)
    Vbar = Vz * (z ** 4).inverse()
    alpha = ChartTensor(chart, "d", alpha.comps)
    omega_sigma = ChartTensor(chart, "dd", omega_sigma.comps, "antisymmetric")
    return CalabiModel(V, k, chart, gplus, gminus, omegaplus, omegaminus, Jplus, Jminus, alpha, omega_sigma, zbar, Vbar)


# ---------------------------------------------------------------------------
# Plebanski-Demianski family

PD_PARAMETERS = ("h", "kappa", "sigma", "delta", "gamma", "epsilon", "lam")


def pd_quartics(h, kappa, sigma, delta, gamma, epsilon, lam):
    """Descending coefficients of A and B; works for Fractions or ring elements."""
    A = (lam - epsilon * epsilon * h, epsilon * (sigma - delta), gamma, sigma + delta, h + kappa)
    B = (-(lam + epsilon * epsilon * h), epsilon * (sigma + delta), -gamma, sigma - delta, h - kappa)
    return A, B


def build_pd(h, kappa, sigma, delta, gamma, epsilon, lam) -> AmbitoricSpec:
    """Hyperbolic spec with p = 1 + epsilon z^2."""
    params = [Fraction(v) for v in (h, kappa, sigma, delta, gamma, epsilon, lam)]
    A, B = pd_quartics(*params)
    p = QuadraticForm(params[5], 0, 1)
    return AmbitoricSpec("hyperbolic", quartic(A), quartic(B), p=p)


def pd_symbolic() -> tuple:
    """A, B coefficient lists over the polynomial ring in the seven parameters."""
    pr = ring(PD_PARAMETERS)
    A, B = pd_quartics(*pr.vars(*PD_PARAMETERS))
    return pr, A, B
