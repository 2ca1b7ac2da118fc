"""Acceptance suite: one test, and one summary line, per criterion.

Tolerances are pinned here. Every comparison is exact equality of canonical
rational functions or rationals (tolerance zero); the only numeric bound is
the per-spec wall clock limit of criterion 1.

Run as a script to print the eight PASS/FAIL lines without pytest.
"""

from __future__ import annotations

import random
import time
from fractions import Fraction

import pytest

from ambitoric.binary_forms import (
    BinaryForm,
    QuadraticForm,
    curvature_bracket_fn,
    discriminant,
    inner_product,
    poisson_bracket,
    transvectant,
)
from ambitoric.builder import NAMED_Q, build, build_calabi, pd_symbolic, quartic
from ambitoric.classifier import (
    SCALAR_CALIBRATION,
    _extremal_oracle,
    bach_condition,
    bflat_fourth_power,
    calabi_classify,
    csc_conditions,
    diagonal_ricci_killing_existence,
    diagonal_ricci_metric,
    em_constant,
    extremal_conditions,
    extremal_invariant,
    killing_tensor_from_FG,
    scalar_curvature_closed,
)
from ambitoric.exact_algebra import R
from ambitoric.instances import (
    CSC_P,
    bach_instance,
    extremal_instance,
    null_orthogonal,
    printed_csc_instance,
    random_orthogonal,
    random_spec,
)
from ambitoric.tensors import (
    ChartTensor,
    bach,
    compose,
    covariant_derivative,
    exterior_derivative,
    identity,
    weyl_split,
)

TYPES = ("parabolic", "hyperbolic", "elliptic")
SEED = 2024
SECONDS_PER_SPEC = 10.0  # criterion 1 wall clock bound
N_KAHLER = 20  # specs per named type, criteria 1 and 2
N_EXTREMAL = 10  # satisfying and violating instances per type, criterion 3
N_BACH = 5  # each way per type, criterion 4
N_CSC = 5  # each way per listed p, criterion 5
N_QIP = 100
N_SQUARE = 20
N_KILLING_FG = 5
N_ORTHO_P = 10

RESULTS: dict = {}

x, y = R.vars("x", "y")


def _record(n, title, ok, detail):
    RESULTS[n] = (title, ok, detail)
    return ok


def _specs(seed_offset=0):
    rng = random.Random(SEED + seed_offset)
    return [(t, random_spec(t, rng)) for t in TYPES for _ in range(N_KAHLER)]


# ---------------------------------------------------------------------------


def criterion_1():
    minus_one = None
    worst = 0.0
    failures = []
    for t, s in _specs():
        t0 = time.perf_counter()
        m = build(s)
        if minus_one is None:
            minus_one = identity(m.chart).map(lambda c: -c)
        for sign in "+-":
            J, g, w = m.J(sign), m.metric(sign), m.omega(sign)
            if not exterior_derivative(w).is_zero():
                failures.append((t, s, sign, "d omega"))
            if not covariant_derivative(J, g).is_zero():
                failures.append((t, s, sign, "nabla J"))
            if compose(J, J) != minus_one:
                failures.append((t, s, sign, "J^2"))
        elapsed = time.perf_counter() - t0
        worst = max(worst, elapsed)
        if elapsed > SECONDS_PER_SPEC:
            failures.append((t, s, "", f"{elapsed:.1f}s"))
    ok = not failures
    return _record(1, "Kahler suite", ok, f"{3 * N_KAHLER} specs, slowest {worst:.2f}s" + ("" if ok else f"; {failures[0]}"))


def criterion_2():
    bad = []
    for t, s in _specs():
        m = build(s)
        closed = scalar_curvature_closed(s)
        oracle = (m.gplus.curvature.scalar, m.gminus.curvature.scalar)
        if any(o != c * SCALAR_CALIBRATION for o, c in zip(oracle, closed)):
            bad.append((t, s))
    ok = not bad
    return _record(2, "scalar curvature oracle vs closed form", ok,
                   f"{3 * N_KAHLER} specs, calibration {SCALAR_CALIBRATION}" + ("" if ok else f"; {len(bad)} mismatches"))


def criterion_3():
    rng = random.Random(SEED + 3)
    counts = {True: 0, False: 0}
    bad = []
    for t in TYPES:
        q = NAMED_Q[t]
        for satisfy in (True, False):
            for _ in range(N_EXTREMAL):
                s = extremal_instance(t, rng, satisfy)
                table = not any(v for _, v in extremal_conditions(s))
                m = build(s)
                plus = _extremal_oracle(m.gplus, m.Jplus)
                minus = _extremal_oracle(m.gminus, m.Jminus)
                counts[table] += 1
                if not (table == plus == minus == satisfy):
                    bad.append((t, s, table, plus, minus))
                if table:
                    holds, pi, P = extremal_invariant(s)
                    qb, pib = q.as_binary_form(), pi.as_binary_form()
                    if not (holds and inner_product(pi, q) == 0 and s.A == (qb * pib + P).with_bound(4)
                            and s.B == (qb * pib - P).with_bound(4)):
                        bad.append((t, s, "decomposition"))
    ok = not bad and counts[True] >= 3 * N_EXTREMAL and counts[False] >= 3 * N_EXTREMAL
    return _record(3, "extremality biconditional", ok,
                   f"{counts[True]} satisfying, {counts[False]} violating" + ("" if ok else f"; {bad[:1]}"))


def criterion_4():
    rng = random.Random(SEED + 4)
    bad = []
    ratios = 0
    for t in TYPES:
        for satisfy in (True, False):
            for _ in range(N_BACH):
                s = bach_instance(t, rng, satisfy)
                table = bach_condition(s)[1] == 0
                m = build(s)
                flat = bach(m.gplus).is_zero()
                if not (table == flat == satisfy):
                    bad.append((t, s, table, flat))
                if flat:
                    r = bflat_fourth_power(m)
                    if r is not None:
                        ratios += 1
                        if not r.is_constant():
                            bad.append((t, s, "fourth power"))
    fx = build(quartic_spec("hyperbolic", [0, 0, 0, 1, 0], [0, 0, 0, 1, 0]))
    split = weyl_split(fx.gplus)
    sminus = fx.gminus.curvature.scalar
    g = fx.gminus.conformal((sminus * sminus).inverse())
    fixture_ok = split.wplus.is_zero() and not sminus.is_zero() and ChartTensor(
        g.chart, "dd", g.curvature.ricci_tracefree).is_zero()
    ok = not bad and fixture_ok
    return _record(4, "Bach-flat and Einstein", ok,
                   f"{6 * N_BACH} instances, {ratios} fourth-power checks, fixture {'ok' if fixture_ok else 'FAILED'}"
                   + ("" if not bad else f"; first mismatch {bad[0]}"))


def quartic_spec(t, A, B, p=None):
    from ambitoric.builder import AmbitoricSpec

    return AmbitoricSpec(t, quartic(A), quartic(B), p=p)


def criterion_5():
    rng = random.Random(SEED + 5)
    mismatches = []
    em_bad = []
    total = 0
    for t in TYPES:
        for p in CSC_P[t]:
            for satisfy in (True, False):
                for _ in range(N_CSC):
                    s = printed_csc_instance(t, p, rng, satisfy)
                    total += 1
                    table = not any(v for _, v in csc_conditions(s, p))
                    m = build(s)
                    diag = diagonal_ricci_metric(m, p)
                    constant = diag.scalar_oracle.is_constant()
                    if table != constant:
                        mismatches.append((t, p, s))
                    if constant:
                        c, residual = em_constant(diag.metric, m.omegaplus, m.omegaminus)
                        if not (residual.is_zero() and c.is_constant()):
                            em_bad.append(s)
    pr, A, B = pd_symbolic()
    eps = pr.var("epsilon")
    pd_ok = all(e.is_zero() for e in (
        A[0] + B[0] + eps**2 * (A[4] + B[4]),
        A[1] + B[1] - eps * (A[3] + B[3]),
        A[2] + B[2],
        A[1] - B[1] + eps * (A[3] - B[3]),
    ))
    ok = not mismatches and not em_bad and pd_ok
    detail = f"{total} instances, {len(mismatches)} table/oracle mismatches, EM residual failures {len(em_bad)}, PD identities {'hold' if pd_ok else 'FAIL'}"
    rows = sorted({(t, _row(p.triple)) for t, p, _ in mismatches})
    if mismatches:
        t, p, s = mismatches[0]
        detail += f"; rows {rows}; first A = {_row(s.a())}, B = {_row(s.b())}"
    return _record(5, "CSC / Einstein-Maxwell", ok, detail)


def _row(values):
    return " ".join(str(v) for v in values)


def criterion_6():
    rng = random.Random(SEED + 6)

    def quad():
        return QuadraticForm(*[Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(3)])

    bad = 0
    for _ in range(N_QIP):
        p, q = quad(), quad()
        if discriminant(poisson_bracket(p, q)) != inner_product(p, q) ** 2 - 4 * discriminant(p) * discriminant(q):
            bad += 1
        pb, qb = p.as_binary_form(), q.as_binary_form()
        # pinned constants: (p,q)^(1) = -2 {p,q}, (p,q)^(2) = -2 <p,q>
        if transvectant(pb, qb, 1) != poisson_bracket(p, q).as_binary_form().scale(-2):
            bad += 1
        if transvectant(pb, qb, 2) != BinaryForm((-2 * inner_product(p, q),), 0):
            bad += 1
    for _ in range(N_SQUARE):
        a, b = rng.choice([i for i in range(-5, 6) if i]), rng.randint(-5, 5)
        s = a * x + b
        pfun = s * s
        C = quartic([rng.randint(-5, 5) for _ in range(5)]).as_function("x")
        lhs = pfun * pfun * (pfun * (C / (pfun * pfun)).diff("x")).diff("x")
        if lhs != curvature_bracket_fn(pfun, C, "x"):
            bad += 1
    ok = bad == 0
    return _record(6, "binary form identities", ok, f"{N_QIP} pairs, {N_SQUARE} square brackets, {bad} failures")


def criterion_7():
    rng = random.Random(SEED + 7)
    bad = []
    null_witness = 0
    for t in TYPES:
        q = NAMED_Q[t]
        m = build(random_spec(t, rng))
        if not killing_tensor_from_FG(m, barycentric=True).killing:
            bad.append((t, "barycentric"))
        for _ in range(N_KILLING_FG):
            while True:
                F = [rng.randint(-3, 3) for _ in range(3)]
                G = [rng.randint(-3, 3) for _ in range(3)]
                # h = F(x) - G(y) vanishes only for equal constants
                if any(F[:2]) or any(G[:2]) or F[2] != G[2]:
                    break
            if not killing_tensor_from_FG(m, F, G).killing:
                bad.append((t, F, G))
        ps = [random_orthogonal(q, rng) for _ in range(N_ORTHO_P)]
        if t == "hyperbolic":
            nulls = null_orthogonal(q)
            ps[0] = nulls[0]
        for p in ps:
            s = m.spec
            h = (x - y) * q.polarize() / p.polarize() ** 2
            hxy_zero = h.diff("x").diff("y").is_zero()
            verdict = diagonal_ricci_killing_existence(s, p).holds
            if verdict != hxy_zero:
                bad.append((t, p))
            if t == "hyperbolic" and verdict:
                null_witness += 1
    ok = not bad and null_witness >= 1
    return _record(7, "Killing tensors", ok, f"{3 * N_KILLING_FG} F,G pairs, {3 * N_ORTHO_P} p, {null_witness} null witnesses")


CALABI_SETS = [
    ([1, 0, 2, 0, 0], 2),  # z^4 + k z^2
    ([0, 0, 3, 1, 0], 3),  # k z^2 + z
    ([0, 1, -1, 0, 0], -1),
    ([2, 1, 0, 4, 2], 0),
    ([0, 1, 1, 0, 3], 2),
]


def criterion_8():
    bad = []
    for V, k in CALABI_SETS:
        flags = calabi_classify(V, k, oracle=False).flags
        c = build_calabi(V, k)
        g = c.gplus
        s = g.curvature.scalar
        extremal = _extremal_oracle(g, c.Jplus)
        found = {
            "extremal": extremal,
            "bach_flat": extremal and bach(g).is_zero(),
            "csc": s.is_constant(),
            "kahler_einstein": ChartTensor(g.chart, "dd", g.curvature.ricci_tracefree).is_zero(),
        }
        if found != flags:
            bad.append((V, k, flags, found))
    ok = not bad
    return _record(8, "Calabi chart flags", ok, f"{len(CALABI_SETS)} coefficient sets" + ("" if ok else f"; {bad[0]}"))


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8]


def summary_lines():
    out = []
    for n in sorted(RESULTS):
        title, ok, detail = RESULTS[n]
        out.append(f"criterion {n} {'PASS' if ok else 'FAIL'}: {title} ({detail})")
    return out


@pytest.mark.parametrize("n", range(1, 9))
def test_criterion(n):
    ok = CRITERIA[n - 1]()
    title, _, detail = RESULTS[n]
    assert ok, f"criterion {n} ({title}): {detail}"


if __name__ == "__main__":
    for fn in CRITERIA:
        fn()
    print("\n".join(summary_lines()))
