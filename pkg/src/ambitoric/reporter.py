"""Spec files, check pipelines and report rendering.

A spec file is line oriented::

    # comment
    type: hyperbolic
    A: 0 0 0 1 0        # descending powers, z^4 first
    B: 0 0 0 1 0
    p: 0 0 1            # optional, (p0, p1, p2) with p = p0 z^2 + 2 p1 z + p2
    q: 1 0 -1           # general type only, same half-coefficient convention

Coefficients are exact rationals such as ``-3`` or ``5/2``.
"""

from __future__ import annotations

import json
import random
import re
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

from .binary_forms import QuadraticForm
from .builder import (
    FORM_TYPES,
    NAMED_Q,
    AmbitoricModel,
    AmbitoricSpec,
    build,
    build_pd,
    quartic,
)
from .classifier import (
    Verdict,
    bach_condition,
    bach_flat_check,
    bflat_fourth_power,
    calabi_classify,
    csc_conditions,
    csc_em_check,
    diagonal_ricci_killing_existence,
    einstein_conformal,
    extremal_check,
    extremal_conditions,
    kahler_check,
    killing_tensor_from_FG,
)
from .errors import AmbitoricError, InconsistencyError, MalformedInputError
from .exact_algebra import format_rational, parse_rational
from .instances import CSC_P, _violate, bach_instance, printed_csc_instance

EXPECTABLE = ("extremal", "bachflat", "csc", "einstein")
_EXPECT_NAME = {"extremal": "extremal", "bachflat": "bach_flat", "csc": "csc", "einstein": "einstein"}
_COUNTS = {"type": 1, "A": 5, "B": 5, "p": 3, "q": 3}


# ---------------------------------------------------------------------------
# spec files


def parse_spec_text(text: str) -> AmbitoricSpec:
    fields: dict = {}
    lines: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        if ":" not in line:
            raise MalformedInputError("expected 'key: values'", lineno, 1)
        key, _, rest = line.partition(":")
        key = key.strip()
        if key not in _COUNTS:
            raise MalformedInputError(f"unknown key {key!r}", lineno, raw.index(key) + 1 if key else 1)
        if key in fields:
            raise MalformedInputError(f"duplicate key {key!r}", lineno, 1)
        offset = len(key) + 1
        tokens = []
        pos = offset
        for tok in rest.split():
            col = line.index(tok, pos) + 1
            pos = col - 1 + len(tok)
            tokens.append((tok, col))
        if len(tokens) != _COUNTS[key]:
            raise MalformedInputError(f"{key} needs {_COUNTS[key]} value(s), got {len(tokens)}", lineno, offset + 1)
        if key == "type":
            tok, col = tokens[0]
            if tok not in FORM_TYPES:
                raise MalformedInputError(f"unknown type {tok!r}", lineno, col)
            fields[key] = tok
        else:
            values = []
            for tok, col in tokens:
                try:
                    values.append(parse_rational(tok))
                except MalformedInputError as exc:
                    raise MalformedInputError(f"bad coefficient {tok!r}", lineno, col) from exc
            fields[key] = values
        lines[key] = lineno
    for key in ("type", "A", "B"):
        if key not in fields:
            raise MalformedInputError(f"missing key {key!r}")
    form_type = fields["type"]
    if form_type == "general" and "q" not in fields:
        raise MalformedInputError("type general needs q", lines["type"])
    if form_type != "general" and "q" in fields:
        raise MalformedInputError(f"q is fixed for type {form_type}", lines["q"])
    q = QuadraticForm(*fields["q"]) if "q" in fields else None
    p = QuadraticForm(*fields["p"]) if "p" in fields else None
    try:
        return AmbitoricSpec(form_type, quartic(fields["A"]), quartic(fields["B"]), q=q, p=p)
    except MalformedInputError as exc:
        line = lines.get("p") if p is not None and "p" in str(exc) else None
        raise MalformedInputError(str(exc), line) from exc


def parse_spec_file(path) -> AmbitoricSpec:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise MalformedInputError(f"cannot read {path}: {exc.strerror}") from exc
    return parse_spec_text(text)


def _row(values) -> str:
    return " ".join(format_rational(v) for v in values)


def format_spec(spec: AmbitoricSpec) -> str:
    out = [f"type: {spec.form_type}"]
    if spec.form_type == "general":
        out.append(f"q: {_row(spec.q.triple)}")
    out.append(f"A: {_row(spec.a())}")
    out.append(f"B: {_row(spec.b())}")
    if spec.p is not None:
        out.append(f"p: {_row(spec.p.triple)}")
    return "\n".join(out) + "\n"


def spec_dict(spec: Optional[AmbitoricSpec]) -> Optional[dict]:
    if spec is None:
        return None
    d = {
        "type": spec.form_type,
        "q": [format_rational(c) for c in spec.q.triple],
        "A": [format_rational(c) for c in spec.a()],
        "B": [format_rational(c) for c in spec.b()],
    }
    if spec.p is not None:
        d["p"] = [format_rational(c) for c in spec.p.triple]
    return d


# ---------------------------------------------------------------------------
# reports


@dataclass
class Section:
    name: str
    holds: bool
    digest: str
    ms: float = 0.0
    note: str = ""


@dataclass
class Report:
    spec: Optional[AmbitoricSpec] = None
    sections: list = field(default_factory=list)
    header: dict = field(default_factory=dict)  # extra deterministic fields

    def add(self, name: str, fn: Callable[[], "Verdict | Section"]):
        t0 = time.perf_counter()
        out = fn()
        ms = (time.perf_counter() - t0) * 1000
        if isinstance(out, Verdict):
            out = Section(out.name if name is None else name, out.holds, out.digest(), note=out.note)
        out.ms = ms
        self.sections.append(out)
        return out

    def section(self, name: str) -> Optional[Section]:
        return next((s for s in self.sections if s.name == name), None)

    @property
    def all_hold(self) -> bool:
        return all(s.holds for s in self.sections)


def emit(report: Report, fmt: str = "text") -> bytes:
    if fmt == "json":
        doc = {
            "spec": spec_dict(report.spec),
            "sections": [s.name for s in report.sections],
            "verdicts": [s.holds for s in report.sections],
            "residual_digests": [s.digest for s in report.sections],
            "timings_ms": [round(s.ms, 3) for s in report.sections],
        }
        if report.header:
            doc["summary"] = report.header
        return (json.dumps(doc, indent=2, sort_keys=False) + "\n").encode("utf-8")
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}")
    out = []
    if report.spec is not None:
        out.append(format_spec(report.spec).rstrip("\n"))
        out.append("")
    for key, value in report.header.items():
        out.append(f"{key}: {value}")
    width = max((len(s.name) for s in report.sections), default=0)
    for s in report.sections:
        mark = "ok  " if s.holds else "FAIL"
        line = f"{mark} {s.name:<{width}}  {s.digest}"
        if s.note:
            line += f"  ({s.note})"
        out.append(line)
    return ("\n".join(out) + "\n").encode("utf-8")


# ---------------------------------------------------------------------------
# pipelines


def _summary_section(model: AmbitoricModel) -> Section:
    s = model.spec
    q = _row(s.q.triple)
    return Section("build", True, f"q = ({q}); orientation {model.chart.orientation}; f = {model.f}")


def _killing_section(model: AmbitoricModel) -> Section:
    res = killing_tensor_from_FG(model, barycentric=True)
    return Section("killing_tensor", res.killing, res.residual.witness_text(), note="g0(J+J-.,.) on g0")


def run_check(path_or_spec, expect: Optional[str] = None) -> tuple:
    """Full pipeline on one spec; returns (report, exit_code)."""
    spec = path_or_spec if isinstance(path_or_spec, AmbitoricSpec) else parse_spec_file(path_or_spec)
    report = Report(spec)
    holder = {}

    def do_build():
        holder["model"] = build(spec)
        return _summary_section(holder["model"])

    report.add("build", do_build)
    model = holder["model"]
    report.add(None, lambda: kahler_check(model, "+"))
    report.add(None, lambda: kahler_check(model, "-"))
    ext = report.add(None, lambda: extremal_check(model).verdict)
    bf = None
    if ext.holds:
        bf = report.add(None, lambda: bach_flat_check(model))
        if bf.holds:
            report.add("einstein", lambda: _einstein_section(model))
    if spec.p is not None:
        report.add("csc", lambda: _csc_section(model))
        report.add("killing_diagonal_ricci", lambda: _diag_killing_section(spec))
    report.add("killing_tensor", lambda: _killing_section(model))

    if expect is None:
        requested = [s for s in report.sections if s.name in ("kahler+", "kahler-", "killing_tensor")]
    else:
        name = _EXPECT_NAME[expect]
        sec = report.section(name)
        requested = [sec] if sec is not None else [Section(name, False, "not applicable")]
        if sec is None:
            why = {"bach_flat": "not extremal", "einstein": "not Bach-flat", "csc": "no p given"}.get(name, "")
            report.sections.append(Section(name, False, f"not applicable: {why}"))
    code = 0 if all(s.holds for s in requested) else 1
    return report, code


def _einstein_section(model: AmbitoricModel) -> Section:
    e = einstein_conformal(model)
    if e.conformally_flat:
        return Section("einstein", True, "zero", note="conformally flat")
    ratio = bflat_fourth_power(model)
    note = f"s{e.which}^-2 g{e.which}"
    if ratio is not None:
        note += f"; (s-/s+)^4 (x-y)^4/q^4 = {ratio}"
    return Section("einstein", e.einstein, e.ric0_residual.witness_text(), note=note)


def _csc_section(model: AmbitoricModel) -> Section:
    r = csc_em_check(model, model.spec.p)
    note = []
    if r.holds:
        note.append(f"c = {format_rational(r.c)}")
        if r.einstein:
            note.append("Einstein")
    if r.verdict.note:
        note.append(r.verdict.note)
    return Section("csc", r.holds, r.verdict.digest(), note="; ".join(note))


def _diag_killing_section(spec: AmbitoricSpec) -> Section:
    k = diagonal_ricci_killing_existence(spec, spec.p)
    return Section("killing_diagonal_ricci", True, "Q(p) = 0" if k.holds else f"h_xy = {k.h_xy.sample_monomial()}",
                   note="Killing tensor exists" if k.holds else "no Killing tensor")


def run_classify(path_or_spec) -> Report:
    spec = path_or_spec if isinstance(path_or_spec, AmbitoricSpec) else parse_spec_file(path_or_spec)
    report, _ = run_check(spec)
    report.sections = [s for s in report.sections if s.name in ("extremal", "bach_flat", "einstein", "csc")]
    return report


# ---------------------------------------------------------------------------
# randomized table experiment


def _witness(spec: AmbitoricSpec, witness_dir, label: str) -> Path:
    d = Path(witness_dir)
    d.mkdir(parents=True, exist_ok=True)
    safe = re.sub(r"[^A-Za-z0-9_.-]+", "_", label).strip("_")
    path = d / f"witness_{safe}.spec"
    path.write_text(f"# {label}\n" + format_spec(spec), encoding="utf-8")
    return path


def table_experiment(form_type: str, trials: int, seed: int, witness_dir=".", csc: bool = False) -> Report:
    """Compare the coefficient tables with the tensor oracle on random instances.

    Each trial draws one extremal instance (Bach-flat on even trials, not on
    odd ones) and one violating instance obtained by raising a coefficient of B.
    Both go through the extremality biconditional; the extremal one also goes
    through the Bach biconditional. ``csc`` adds a satisfying and a violating
    instance per listed p and trial. A disagreement raises
    :class:`InconsistencyError` after the witness spec is written to
    ``witness_dir``.
    """
    if trials < 1:
        raise MalformedInputError("trials must be >= 1")
    if form_type not in NAMED_Q:
        raise MalformedInputError(f"table experiment needs a named type, not {form_type!r}")
    rng = random.Random(seed)
    counts = {"instances": 0}
    timings = {}

    def check(kind, spec, table, oracle_fn):
        t0 = time.perf_counter()
        counts[kind] = counts.get(kind, 0) + 1
        try:
            oracle = oracle_fn(spec)
        except InconsistencyError:
            oracle = None
        timings[kind] = timings.get(kind, 0.0) + (time.perf_counter() - t0) * 1000
        if oracle is None or oracle != table:
            path = _witness(spec, witness_dir, f"{form_type}_{kind}_{counts[kind]}")
            raise InconsistencyError(f"{kind}: table {table}, oracle {oracle}; witness written to {path}")

    def extremal_oracle(s):
        return extremal_check(s).verdict.oracle

    def bach_oracle(s):
        return bach_flat_check(s).oracle

    for trial in range(trials):
        good = bach_instance(form_type, rng, satisfy=trial % 2 == 0)
        bad = _violate(good, extremal_conditions, rng)
        for spec in (good, bad):
            counts["instances"] += 1
            check("extremal", spec, not any(v for _, v in extremal_conditions(spec)), extremal_oracle)
        check("bach", good, bach_condition(good)[1] == 0, bach_oracle)
    report = Report()
    report.sections.append(Section("extremal_table", True, f"{counts['extremal']} instances agree", timings["extremal"]))
    report.sections.append(Section("bach_table", True, f"{counts['bach']} instances agree", timings["bach"]))
    if csc:
        for p in CSC_P[form_type]:
            kind = f"csc p=({_row(p.triple)})"
            for _ in range(trials):
                for satisfy in (True, False):
                    spec = printed_csc_instance(form_type, p, rng, satisfy)
                    counts["instances"] += 1
                    table = not any(v for _, v in csc_conditions(spec, p))
                    check(kind, spec, table, lambda s: csc_em_check(s, p).verdict.oracle)
            report.sections.append(Section(kind, True, f"{counts[kind]} instances agree", timings[kind]))
    report.header = {"type": form_type, "trials": trials, "seed": seed, "instances": counts["instances"]}
    return report


# ---------------------------------------------------------------------------
# families


def run_pd(params) -> Report:
    spec = build_pd(*params)
    report = Report(spec)
    holder = {}

    def do_build():
        holder["model"] = build(spec)
        return _summary_section(holder["model"])

    report.add("build", do_build)
    report.add("csc", lambda: _csc_section(holder["model"]))
    return report


def run_calabi(V, k) -> Report:
    report = Report()
    holder = {}

    def run():
        holder["r"] = calabi_classify(V, k)
        return Section("calabi", True, "oracle agrees with coefficient flags")

    report.add("calabi", run)
    r = holder["r"]
    report.header = {"V": _row(r.V.descending()), "k": format_rational(r.k)}
    a0, a1, a2, a3, a4 = r.V.descending()
    residues = {
        "extremal": [("a2-k", a2 - r.k)],
        "bach_flat": [("a2-k", a2 - r.k), ("4a0a4-a1a3", 4 * a0 * a4 - a1 * a3)],
        "csc": [("a2-k", a2 - r.k), ("a0", a0)],
        "kahler_einstein": [("a2-k", a2 - r.k), ("a0", a0), ("a3", a3)],
    }
    for key, flag in r.flags.items():
        bad = [f"{label} = {format_rational(v)}" for label, v in residues[key] if v != 0]
        report.sections.append(Section(key, flag, "; ".join(bad) or "zero"))
    return report


__all__ = [
    "EXPECTABLE",
    "Report",
    "Section",
    "emit",
    "format_spec",
    "parse_spec_file",
    "parse_spec_text",
    "run_calabi",
    "run_check",
    "run_classify",
    "run_pd",
    "table_experiment",
    "AmbitoricError",
]
