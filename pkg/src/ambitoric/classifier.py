"""Curvature criteria for ambitoric and Calabi-type metrics.

Every coefficient criterion is paired with a tensor computation on the
built metric (the oracle); wrappers raise :class:`InconsistencyError` when
the two disagree, so a returned verdict has been confirmed both ways.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .binary_forms import (
    BinaryForm,
    QuadraticForm,
    as_quadratic,
    curvature_bracket_fn,
    discriminant,
    inner_product,
    poisson_bracket,
    transvectant,
)
from .builder import AmbitoricModel, AmbitoricSpec, build, build_calabi, quartic
from .errors import InconsistencyError, MalformedInputError, PreconditionError
from .exact_algebra import R, RationalFunction
from .tensors import (
    ChartTensor,
    Metric,
    bach,
    compose,
    covariant_derivative,
    exterior_derivative,
    form_from_endomorphism,
    gradient_killing_field,
    identity,
    killing_tensor_residual,
    killing_vector_residual,
    nijenhuis,
    pfaffian,
    zeros,
)

# Ratio oracle/closed form for the scalar curvatures, fixed on the hyperbolic
# A = B = z instance (s- = -12/(x - y) by both routes) and never re-fitted.
SCALAR_CALIBRATION = Fraction(1)


@dataclass
class Verdict:
    name: str
    holds: bool
    residuals: list = field(default_factory=list)  # (label, exact value) pairs that are nonzero
    oracle: Optional[bool] = None
    note: str = ""

    def digest(self) -> str:
        if self.holds:
            return "zero"
        return "; ".join(f"{label} = {value}" for label, value in self.residuals) or "nonzero"


@dataclass
class ClassificationReport:
    spec: AmbitoricSpec
    verdicts: list = field(default_factory=list)
    derived: dict = field(default_factory=dict)

    def verdict(self, name: str) -> Optional[Verdict]:
        return next((v for v in self.verdicts if v.name == name), None)


def _nonzero(pairs) -> list:
    return [(label, value) for label, value in pairs if value != 0]


def _model(spec_or_model) -> AmbitoricModel:
    if isinstance(spec_or_model, AmbitoricModel):
        return spec_or_model
    return build(spec_or_model)


def _spec(spec_or_model) -> AmbitoricSpec:
    return spec_or_model.spec if isinstance(spec_or_model, AmbitoricModel) else spec_or_model


def tensor_residual_zero(t) -> bool:
    return t.is_zero()


def _poly_divide(num: BinaryForm, den: BinaryForm) -> Optional[BinaryForm]:
    """Exact quotient of univariate forms, or None when there is a remainder."""
    if den.is_zero():
        return None
    n = list(num.coeffs)
    d = list(den.coeffs[: den.degree + 1])
    dd = den.degree
    out = [Fraction(0)] * max(len(n) - dd, 1)
    for k in range(len(n) - 1, dd - 1, -1):
        if n[k]:
            c = n[k] / d[dd]
            out[k - dd] = c
            for j in range(dd + 1):
                n[k - dd + j] -= c * d[j]
    if any(n):
        return None
    return BinaryForm(tuple(out), max(num.m - dd, 0))


def _dependent(p: QuadraticForm, w: QuadraticForm) -> bool:
    a, b = p.triple, w.triple
    return a[0] * b[1] == a[1] * b[0] and a[0] * b[2] == a[2] * b[0] and a[1] * b[2] == a[2] * b[1]


# ---------------------------------------------------------------------------
# Kahler structure


def kahler_check(model: AmbitoricModel, sign: str) -> Verdict:
    """J^2 = -1, d omega = 0, N_J = 0, nabla J = 0 and Pf(omega) = +-vol for g+ or g-.

    omega- induces the opposite orientation, hence the sign.
    """
    g, J, omega = model.metric(sign), model.J(sign), model.omega(sign)
    minus_one = identity(model.chart).map(lambda c: -c)
    checks = [
        ("J^2+1", compose(J, J) - minus_one),
        ("d omega", exterior_derivative(omega)),
        ("N_J", nijenhuis(J)),
        ("nabla J", covariant_derivative(J, g)),
    ]
    residuals = [(label, t.witness_text()) for label, t in checks if not t.is_zero()]
    orient = 1 if sign == "+" else -1
    vol = pfaffian(omega) - g.volume * orient
    if not vol.is_zero():
        residuals.append((f"Pf(omega){'-' if orient > 0 else '+'}vol", vol.sample_monomial()))
    return Verdict(f"kahler{sign}", not residuals, residuals)


# ---------------------------------------------------------------------------
# coefficient tables


def extremal_conditions(spec: AmbitoricSpec) -> Optional[list]:
    a, b = spec.a(), spec.b()
    if spec.form_type == "parabolic":
        return [("a0+b0", a[0] + b[0]), ("a1+b1", a[1] + b[1]), ("a2+b2", a[2] + b[2])]
    if spec.form_type == "hyperbolic":
        return [("a0+b0", a[0] + b[0]), ("a2+b2", a[2] + b[2]), ("a4+b4", a[4] + b[4])]
    if spec.form_type == "elliptic":
        return [
            ("a2+b2", a[2] + b[2]),
            ("a0+b0+a4+b4", a[0] + b[0] + a[4] + b[4]),
            ("a1+b1-a3-b3", a[1] + b[1] - a[3] - b[3]),
        ]
    return None


def bach_condition(spec: AmbitoricSpec) -> Optional[tuple]:
    a, b = spec.a(), spec.b()
    if spec.form_type == "parabolic":
        return "a1(a3+b3)+4a0(a4+b4)", a[1] * (a[3] + b[3]) + 4 * a[0] * (a[4] + b[4])
    if spec.form_type == "hyperbolic":
        return "(a3-b3)(a1+b1)+(a3+b3)(a1-b1)", (a[3] - b[3]) * (a[1] + b[1]) + (a[3] + b[3]) * (a[1] - b[1])
    if spec.form_type == "elliptic":
        return "(a3-b1)(a3+b3)+4(a4+b4)(a4+b0)", (a[3] - b[1]) * (a[3] + b[3]) + 4 * (a[4] + b[4]) * (a[4] + b[0])
    return None


def csc_conditions(spec: AmbitoricSpec, p: QuadraticForm, printed: bool = True) -> Optional[list]:
    """Coefficient conditions for the normal-form choices of p, or None.

    ``printed=False`` swaps in the elliptic p = 1 - z^2 row that follows from
    the scalar curvature formula (a0 + b4 = a4 + b0 = 0 rather than
    a0 + b0 = a4 + b4 = 0); the other rows are unchanged.
    """
    a, b = spec.a(), spec.b()
    t = spec.form_type
    if t == "parabolic" and p == QuadraticForm(0, Fraction(1, 2), 0):
        return [("a0+b0", a[0] + b[0]), ("a2+b2", a[2] + b[2]), ("a4+b4", a[4] + b[4]), ("a1-b1", a[1] - b[1])]
    if t == "hyperbolic" and p.q1 == 0 and p.q2 == 1:
        e = p.q0
        return [
            ("a0+b0+e^2(a4+b4)", a[0] + b[0] + e * e * (a[4] + b[4])),
            ("a1+b1-e(a3+b3)", a[1] + b[1] - e * (a[3] + b[3])),
            ("a2+b2", a[2] + b[2]),
            ("a1-b1+e(a3-b3)", a[1] - b[1] + e * (a[3] - b[3])),
        ]
    if t == "elliptic" and p == QuadraticForm(-1, 0, 1):
        if printed:
            ends = [("a0+b0", a[0] + b[0]), ("a4+b4", a[4] + b[4])]
        else:
            ends = [("a0+b4", a[0] + b[4]), ("a4+b0", a[4] + b[0])]
        return [("a2+b2", a[2] + b[2])] + ends + [("a1+b1+a3+b3", a[1] + b[1] + a[3] + b[3])]
    if t == "elliptic" and p == QuadraticForm(0, Fraction(1, 2), 0):
        return [("a0+b0", a[0] + b[0]), ("a2+b2", a[2] + b[2]), ("a4+b4", a[4] + b[4]),
                ("a1-b1+a3-b3", a[1] - b[1] + a[3] - b[3])]
    return None


# ---------------------------------------------------------------------------
# invariant forms of the criteria


def decompose(spec: AmbitoricSpec, base: QuadraticForm):
    """(pi, P) with A = base*pi + P, B = base*pi - P, or (None, P) if base does not divide."""
    half = Fraction(1, 2)
    Pi = (spec.A + spec.B).scale(half)
    P = (spec.A - spec.B).scale(half)
    quotient = _poly_divide(Pi, base.as_binary_form())
    if quotient is None or quotient.degree > 2:
        return None, P
    return as_quadratic(quotient), P


def extremal_invariant(spec: AmbitoricSpec):
    """Decomposition A = q pi + P, B = q pi - P with <pi, q> = 0."""
    pi, P = decompose(spec, spec.q)
    if pi is None:
        return False, None, P
    return inner_product(pi, spec.q) == 0, pi, P


def w_of(q: QuadraticForm, P: BinaryForm) -> QuadraticForm:
    """The quadratic w with s+ = -w(x,y)/q(x,y) on extremal structures.

    Computed as q^2 P''' - 3 q q' P'' + 3 (q'^2 + q q'') P' - 6 q' q'' P.
    With the transvectant normalized so that (p, A)^(2) is the curvature
    bracket, this is -{q, (q, P)^(2)}; the sign is asserted.
    """
    qb = q.as_binary_form()
    q1, q2 = qb.derivative(), qb.derivative(2)
    lhs = (
        qb * qb * P.derivative(3)
        - (qb * q1 * P.derivative(2)).scale(3)
        + ((q1 * q1 + qb * q2) * P.derivative()).scale(3)
        - (q1 * q2 * P).scale(6)
    )
    w = as_quadratic(lhs)
    inner = as_quadratic(transvectant(qb, P, 2, convention="equivariant"))
    if w != -poisson_bracket(q, inner):
        raise InconsistencyError("w differs from -{q, (q,P)^(2)}")
    return w


# ---------------------------------------------------------------------------
# scalar curvature


def scalar_curvature_closed(spec: AmbitoricSpec, ring_=R) -> tuple:
    """Closed forms for s+ and s- built from the curvature bracket."""
    x, y = ring_.var("x"), ring_.var("y")
    qxy = spec.q.polarize("x", "y", ring_)
    A = spec.A.as_function("x", ring_)
    B = spec.B.as_function("y", ring_)
    denom = (x - y) * qxy
    out = []
    for weight in (qxy * qxy, (x - y) * (x - y)):
        total = curvature_bracket_fn(weight, A, "x") + curvature_bracket_fn(weight, B, "y")
        out.append(-total / denom * SCALAR_CALIBRATION)
    return tuple(out)


def scalar_curvature_oracle(model: AmbitoricModel) -> tuple:
    return model.gplus.curvature.scalar, model.gminus.curvature.scalar


def _extremal_oracle(g: Metric, J: ChartTensor) -> bool:
    s = g.curvature.scalar
    K = gradient_killing_field(g, J, s)
    return killing_vector_residual(g, K).is_zero()


@dataclass
class ExtremalResult:
    holds: bool
    pi: Optional[QuadraticForm]
    P: BinaryForm
    verdict: Verdict


def extremal_check(spec_or_model, oracle: bool = True) -> ExtremalResult:
    spec = _spec(spec_or_model)
    inv_holds, pi, P = extremal_invariant(spec)
    table = extremal_conditions(spec)
    residuals = _nonzero(table) if table is not None else []
    holds = (not residuals) if table is not None else inv_holds
    if table is not None and holds != inv_holds:
        raise InconsistencyError("extremality table and decomposition A = q pi + P disagree")
    if table is None and not holds:
        residuals = [("A+B mod q or <pi,q>", "nonzero")]
    verdict = Verdict("extremal", holds, residuals)
    if oracle:
        model = _model(spec_or_model)
        plus = _extremal_oracle(model.gplus, model.Jplus)
        minus = _extremal_oracle(model.gminus, model.Jminus)
        if plus != minus or plus != holds:
            raise InconsistencyError(
                f"extremality: table says {holds}, oracle g+ {plus}, oracle g- {minus}"
            )
        verdict.oracle = plus
    if holds:
        if pi is None or inner_product(pi, spec.q) != 0:
            raise InconsistencyError("extremal but A + B is not q times a quadratic orthogonal to q")
    return ExtremalResult(holds, pi if holds else None, P, verdict)


def extremal_scalar_forms(spec: AmbitoricSpec, ring_=R) -> tuple:
    """(s+, s-) predicted by the decomposition: -w(x,y)/q(x,y) and -24 pi(x,y)/(x-y)."""
    ok, pi, P = extremal_invariant(spec)
    if not ok:
        raise PreconditionError("spec is not extremal")
    x, y = ring_.var("x"), ring_.var("y")
    w = w_of(spec.q, P)
    splus = -w.polarize("x", "y", ring_) / spec.q.polarize("x", "y", ring_)
    sminus = -pi.polarize("x", "y", ring_) * 24 / (x - y)
    return splus, sminus


def polarization_of(r: RationalFunction) -> Optional[QuadraticForm]:
    """Quadratic w with r = w(x, y), if r is such a polarization."""
    if not r.is_polynomial():
        return None
    coeffs = {}
    ring_ = r.ring
    ix, iy = ring_.index("x"), ring_.index("y")
    for exps, c in r.terms():
        others = [e for i, e in enumerate(exps) if i not in (ix, iy)]
        if any(others) or exps[ix] > 1 or exps[iy] > 1:
            return None
        coeffs[exps[ix], exps[iy]] = Fraction(c)
    if coeffs.get((1, 0), 0) != coeffs.get((0, 1), 0):
        return None
    return QuadraticForm(coeffs.get((1, 1), 0), coeffs.get((1, 0), 0), coeffs.get((0, 0), 0))


# ---------------------------------------------------------------------------
# Bach-flatness and Einstein metrics


def bach_flat_check(spec_or_model, oracle: bool = True) -> Verdict:
    spec = _spec(spec_or_model)
    ext = extremal_check(spec_or_model, oracle=False)
    if not ext.holds:
        raise PreconditionError("Bach-flat criterion applies to extremal structures only")
    inv = _dependent(ext.pi, w_of(spec.q, ext.P))
    cond = bach_condition(spec)
    if cond is not None:
        holds = cond[1] == 0
        if holds != inv:
            raise InconsistencyError("Bach table relation and pi ~ {q,(q,P)^(2)} disagree")
        residuals = [] if holds else [cond]
    else:
        holds = inv
        residuals = [] if holds else [("pi x w", "nonzero")]
    verdict = Verdict("bach_flat", holds, residuals)
    if oracle:
        model = _model(spec_or_model)
        flat = bach(model.gplus).is_zero()
        if flat != holds:
            raise InconsistencyError(f"Bach-flat: criterion {holds}, bach(g+) zero {flat}")
        verdict.oracle = flat
    return verdict


@dataclass
class EinsteinResult:
    metric: Optional[Metric]
    ric0_residual: Optional[ChartTensor]
    which: Optional[str]
    conformally_flat: bool = False

    @property
    def einstein(self) -> bool:
        return self.ric0_residual is not None and self.ric0_residual.is_zero()


def einstein_conformal(spec_or_model, which: Optional[str] = None) -> EinsteinResult:
    """Einstein metric s^-2 g in the conformal class of a Bach-flat structure."""
    model = _model(spec_or_model)
    if not bach_flat_check(model, oracle=False).holds:
        raise PreconditionError("einstein_conformal needs a Bach-flat structure")
    scal = {"+": model.gplus.curvature.scalar, "-": model.gminus.curvature.scalar}
    order = [which] if which else ["-", "+"]
    for sign in order:
        s = scal[sign]
        if s:
            g = model.metric(sign).conformal((s * s).inverse())
            return EinsteinResult(g, ChartTensor(g.chart, "dd", g.curvature.ricci_tracefree), sign)
    return EinsteinResult(None, None, None, conformally_flat=True)


def bflat_fourth_power(model: AmbitoricModel) -> Optional[RationalFunction]:
    """(s-/s+)^4 / (-v-/v+) for Bach-flat structures with s+, s- nonzero.

    The Bach-flat relation C+ s- = C- (-v-/v+)^(1/4) s+ says this is constant.
    """
    sp, sm = model.gplus.curvature.scalar, model.gminus.curvature.scalar
    if not sp or not sm:
        return None
    ratio_v = -pfaffian(model.omegaminus) / pfaffian(model.omegaplus)
    x, y = R.var("x"), R.var("y")
    qxy = model.q_xy
    if ratio_v != (qxy / (x - y)) ** 4:
        raise InconsistencyError("-v-/v+ differs from q(x,y)^4/(x-y)^4")
    return (sm / sp) ** 4 / ratio_v


# ---------------------------------------------------------------------------
# diagonal Ricci metrics, CSC and Einstein-Maxwell


def _check_p(spec: AmbitoricSpec, p: QuadraticForm):
    if p is None or p.is_zero():
        raise MalformedInputError("p must be a nonzero quadratic")
    if inner_product(p, spec.q) != 0:
        raise MalformedInputError(f"p is not orthogonal to q: <p,q> = {inner_product(p, spec.q)}")


def _invariance_residual(t: ChartTensor, J: ChartTensor) -> ChartTensor:
    """t(J., J.) - t."""
    n = t.chart.n
    out = zeros(t.chart, 2)
    for a in range(n):
        for b in range(n):
            total = t.chart.zero()
            for c in range(n):
                for d in range(n):
                    if J.comps[c, a] and J.comps[d, b] and t.comps[c, d]:
                        total = total + J.comps[c, a] * J.comps[d, b] * t.comps[c, d]
            out[a, b] = total - t.comps[a, b]
    return ChartTensor(t.chart, "dd", out)


@dataclass
class DiagonalRicciResult:
    metric: Metric
    diagonal: bool
    scalar_closed: RationalFunction
    scalar_oracle: RationalFunction

    @property
    def scalar_agrees(self) -> bool:
        return self.scalar_closed == self.scalar_oracle


def diagonal_ricci_metric(spec_or_model, p: QuadraticForm) -> DiagonalRicciResult:
    model = _model(spec_or_model)
    spec = model.spec
    _check_p(spec, p)
    ring_ = model.chart.ring
    x, y = ring_.var("x"), ring_.var("y")
    pxy = p.polarize("x", "y", ring_)
    qxy = model.q_xy
    g = model.gplus.conformal((qxy / pxy) ** 2)
    ric = ChartTensor(g.chart, "dd", g.curvature.ricci)
    diagonal = _invariance_residual(ric, model.Jplus).is_zero() and _invariance_residual(ric, model.Jminus).is_zero()
    A = spec.A.as_function("x", ring_)
    B = spec.B.as_function("y", ring_)
    weight = pxy * pxy
    closed = -(curvature_bracket_fn(weight, A, "x") + curvature_bracket_fn(weight, B, "y")) / ((x - y) * qxy)
    closed = closed * SCALAR_CALIBRATION
    return DiagonalRicciResult(g, diagonal, closed, g.curvature.scalar)


def csc_invariant(spec: AmbitoricSpec, p: QuadraticForm) -> tuple:
    """A = p rho + R, B = p rho - R with <rho, p> = 0 and (p, R)^(2) orthogonal to q."""
    rho, Rq = decompose(spec, p)
    if rho is None or inner_product(rho, p) != 0:
        return False, rho, Rq
    pr = as_quadratic(transvectant(p.as_binary_form(), Rq, 2, convention="equivariant"))
    return inner_product(pr, spec.q) == 0, rho, Rq


@dataclass
class CSCResult:
    holds: bool
    c: Optional[Fraction]
    einstein: bool
    verdict: Verdict
    em_residual: Optional[ChartTensor] = None
    table_holds: Optional[bool] = None  # printed normal-form conditions, when p is one of the listed choices


def em_constant(g: Metric, omegaplus: ChartTensor, omegaminus: ChartTensor):
    """c with Ric0(X, Y) = c g(omega+(X), omega-(Y)), and the residual tensor."""
    n = g.n
    rhs = zeros(g.chart, 2)
    for a in range(n):
        for b in range(n):
            total = g.chart.zero()
            for c in range(n):
                for d in range(n):
                    if g.inv[c, d] and omegaplus.comps[a, c] and omegaminus.comps[b, d]:
                        total = total + g.inv[c, d] * omegaplus.comps[a, c] * omegaminus.comps[b, d]
            rhs[a, b] = total
    ric0 = g.curvature.ricci_tracefree
    c = None
    for a in range(n):
        for b in range(n):
            if rhs[a, b]:
                c = ric0[a, b] / rhs[a, b]
                break
        if c is not None:
            break
    if c is None:
        raise InconsistencyError("g(omega+(.), omega-(.)) vanishes identically")
    residual = ChartTensor(g.chart, "dd", ric0 - rhs * c)
    return c, residual


def csc_em_check(spec_or_model, p: QuadraticForm, oracle: bool = True) -> CSCResult:
    """CSC test for g = (q/p)^2 g+ via A = p rho + R, B = p rho - R.

    The printed normal-form conditions are evaluated as well and reported in
    ``table_holds``; they do not decide the verdict.
    """
    spec = _spec(spec_or_model)
    _check_p(spec, p)
    holds, rho, _ = csc_invariant(spec, p)
    table = csc_conditions(spec, p)
    table_holds = None
    residuals = []
    if table is not None:
        residuals = _nonzero(table)
        table_holds = not residuals
    if not holds and not residuals:
        residuals = [("A = p rho + R", "no decomposition")]
    verdict = Verdict("csc", holds, [] if holds else residuals)
    if table_holds is not None and table_holds != holds:
        verdict.note = "printed coefficient conditions disagree with the scalar curvature"
    einstein = bool(holds and rho is not None and _dependent(rho, spec.q))
    c = None
    em_residual = None
    if oracle:
        model = _model(spec_or_model)
        diag = diagonal_ricci_metric(model, p)
        s = diag.scalar_oracle
        constant = s.is_constant()
        if constant != holds:
            raise InconsistencyError(f"CSC: criterion {holds}, ds^g = 0 is {constant}")
        if not diag.scalar_agrees:
            raise InconsistencyError("closed-form s^g differs from the tensor computation")
        verdict.oracle = constant
        if holds:
            cval, em_residual = em_constant(diag.metric, model.omegaplus, model.omegaminus)
            if not em_residual.is_zero() or not cval.is_constant():
                raise InconsistencyError("Einstein-Maxwell residual does not vanish with constant c")
            c = cval.constant_value()
            if einstein and c != 0:
                raise InconsistencyError("rho ~ q but Ric0 != 0")
    return CSCResult(holds, c, einstein, verdict, em_residual, table_holds)


# ---------------------------------------------------------------------------
# Killing tensors


@dataclass
class KillingTensorResult:
    metric: Metric
    S: ChartTensor
    residual: ChartTensor

    @property
    def killing(self) -> bool:
        return self.residual.is_zero()


def killing_tensor_from_FG(model: AmbitoricModel, F=None, G=None, barycentric: bool = False) -> KillingTensorResult:
    """S = f g + h g(I., .) on g = h g0, with h = F(x) - G(y), f = F(x) + G(y), I = J+ J-."""
    I = compose(model.Jplus, model.Jminus)
    if barycentric:
        g = model.g0
        S = form_from_endomorphism(g, I)
        return KillingTensorResult(g, S, killing_tensor_residual(g, S))
    ring_ = model.chart.ring
    Fx = _as_function(F, "x", ring_)
    Gy = _as_function(G, "y", ring_)
    h = Fx - Gy
    if h.is_zero():
        raise PreconditionError("h = F(x) - G(y) vanishes identically; use the barycentric case")
    f = Fx + Gy
    g = model.g0.conformal(h)
    S_comps = g.comps * f + form_from_endomorphism(g, I).comps * h
    S = ChartTensor(g.chart, "dd", S_comps, "symmetric")
    return KillingTensorResult(g, S, killing_tensor_residual(g, S))


def _as_function(F, var, ring_):
    if isinstance(F, RationalFunction):
        return F
    if isinstance(F, BinaryForm):
        return F.as_function(var, ring_)
    if isinstance(F, (list, tuple)):
        return ring_.univariate(var, list(reversed(F)))  # descending input
    return ring_.const(F)


@dataclass
class KillingExistence:
    holds: bool
    h_xy: RationalFunction


def diagonal_ricci_killing_existence(spec: AmbitoricSpec, p: QuadraticForm, ring_=R) -> KillingExistence:
    """Killing tensor on the diagonal-Ricci metric exists iff Q(p) = 0; checked via h_xy."""
    _check_p(spec, p)
    x, y = ring_.var("x"), ring_.var("y")
    pxy = p.polarize("x", "y", ring_)
    h = (x - y) * spec.q.polarize("x", "y", ring_) / (pxy * pxy)
    hxy = h.diff("x").diff("y")
    verdict = discriminant(p) == 0
    if verdict != hxy.is_zero():
        raise InconsistencyError(f"Q(p) = 0 is {verdict} but h_xy = 0 is {hxy.is_zero()}")
    return KillingExistence(verdict, hxy)


# ---------------------------------------------------------------------------
# Calabi type


@dataclass
class CalabiReport:
    V: BinaryForm
    k: Fraction
    flags: dict
    oracle: dict


def calabi_flags(V: BinaryForm, k) -> dict:
    a0, a1, a2, a3, a4 = V.descending()
    extremal = a2 == Fraction(k)
    bach_flat = extremal and 4 * a0 * a4 - a1 * a3 == 0
    csc = extremal and a0 == 0
    ke = csc and a3 == 0
    return {"extremal": extremal, "bach_flat": bach_flat, "csc": csc, "kahler_einstein": ke}


def calabi_classify(V, k, oracle: bool = True) -> CalabiReport:
    if not isinstance(V, BinaryForm):
        V = quartic(V)
    k = Fraction(k)
    flags = calabi_flags(V, k)
    found = {}
    if oracle:
        m = build_calabi(V, k)
        g = m.gplus
        s = g.curvature.scalar
        found["extremal"] = _extremal_oracle(g, m.Jplus)
        found["extremal_minus"] = _extremal_oracle(m.gminus, m.Jminus)
        found["bach_flat"] = found["extremal"] and bach(g).is_zero()
        found["csc"] = s.is_constant()
        found["kahler_einstein"] = ChartTensor(g.chart, "dd", g.curvature.ricci_tracefree).is_zero()
        if found["extremal"] != found["extremal_minus"]:
            raise InconsistencyError("g+ and g- disagree on extremality")
        for key in flags:
            if found[key] != flags[key]:
                raise InconsistencyError(f"Calabi {key}: coefficient test {flags[key]}, oracle {found[key]}")
    return CalabiReport(V, k, flags, found)


# ---------------------------------------------------------------------------
# full report


def classify(spec: AmbitoricSpec, oracle: bool = True) -> ClassificationReport:
    model = build(spec)
    report = ClassificationReport(spec)
    ext = extremal_check(model, oracle=oracle)
    report.verdicts.append(ext.verdict)
    splus, sminus = scalar_curvature_closed(spec)
    report.derived["s+"] = splus
    report.derived["s-"] = sminus
    if ext.holds:
        report.derived["pi"] = ext.pi
        report.derived["P"] = ext.P
        bf = bach_flat_check(model, oracle=oracle)
        report.verdicts.append(bf)
        if bf.holds:
            e = einstein_conformal(model)
            if e.conformally_flat:
                report.verdicts.append(Verdict("einstein", True, note="conformally flat (W = 0)"))
            else:
                report.verdicts.append(
                    Verdict("einstein", e.einstein, [] if e.einstein else [("Ric0", e.ric0_residual.witness_text())],
                            note=f"s{e.which}^-2 g{e.which}")
                )
    if spec.p is not None:
        r = csc_em_check(model, spec.p, oracle=oracle)
        report.verdicts.append(r.verdict)
        if r.holds:
            report.derived["c"] = r.c
            report.derived["einstein_p"] = r.einstein
    return report
