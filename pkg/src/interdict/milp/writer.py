"""Deterministic LP-text and fixed-field MPS renderings of a model.

Exact rationals are rendered as exact decimals when the expansion
terminates, otherwise with 17 significant digits.  Variable order follows
variable ids, constraints keep construction order, so two exports of the
same model are byte-identical.  MPS column names are capped at 8 characters
(fixed-field limit) via a fixed renaming of the long auxiliary prefixes.
"""

from __future__ import annotations

from fractions import Fraction

from ..core import InputError
from ..models import BINARY, CONTINUOUS, INTEGER, MilpModel

FORMATS = ("lp_text", "mps")


def export(model: MilpModel, fmt: str) -> bytes:
    if fmt == "lp_text":
        return _lp_text(model).encode()
    if fmt == "mps":
        return _mps(model).encode()
    raise InputError(f"unknown export format {fmt!r}; expected one of {FORMATS}")


def _fmt_num(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    rest = q.denominator
    twos = fives = 0
    while rest % 2 == 0:
        rest //= 2
        twos += 1
    while rest % 5 == 0:
        rest //= 5
        fives += 1
    if rest != 1:
        return f"{float(q):.17g}"
    k = max(twos, fives)
    scaled = abs(q.numerator) * 10**k // q.denominator
    digits = str(scaled).rjust(k + 1, "0")
    head, tail = digits[:-k], digits[-k:].rstrip("0") or "0"
    sign = "-" if q.numerator < 0 else ""
    return f"{sign}{head}.{tail}"


def _terms(coeffs, names) -> str:
    parts = []
    for vid, coef in coeffs:
        mag = _fmt_num(abs(coef))
        if not parts:
            parts.append(f"{'-' if coef < 0 else ''}{mag} {names[vid]}")
        else:
            parts.append(f"{'+' if coef > 0 else '-'} {mag} {names[vid]}")
    return " ".join(parts) if parts else "0"


def _lp_text(model: MilpModel) -> str:
    names = {v.vid: v.name for v in model.variables}
    lines = [f"\\ Problem: {model.formulation}", "Minimize"]
    lines.append(f"obj: {_terms(model.objective, names)}")
    lines.append("Subject To")
    for con in model.constraints:
        lines.append(
            f"{con.name}: {_terms(con.coeffs, names)} {con.sense} {_fmt_num(con.rhs)}"
        )
    bounds = []
    for v in model.variables:
        if v.kind == BINARY:
            continue  # declared in the Binaries section
        if v.ub is None:
            if v.lb != 0:
                bounds.append(f"{v.name} >= {_fmt_num(v.lb)}")
        else:
            bounds.append(f"{_fmt_num(v.lb)} <= {v.name} <= {_fmt_num(v.ub)}")
    if bounds:
        lines.append("Bounds")
        lines.extend(bounds)
    generals = [v.name for v in model.variables if v.kind == INTEGER]
    if generals:
        lines.append("Generals")
        lines.append(" ".join(generals))
    binaries = [v.name for v in model.variables if v.kind == BINARY]
    if binaries:
        lines.append("Binaries")
        lines.append(" ".join(binaries))
    lines.append("End")
    return "\n".join(lines) + "\n"


def _mps_names(model: MilpModel) -> dict[int, str]:
    names = {}
    for v in model.variables:
        short = (
            v.name.replace("alpha", "a")
            .replace("beta", "b")
            .replace("mu", "m")
            .replace("lam", "l")
        )
        if len(short) > 8:
            short = f"v{v.vid}"
        names[v.vid] = short
    return names


def _entry(name: str, row: str, value: Fraction) -> str:
    return f"    {name:<8}  {row:<8}  {_fmt_num(value):>12}"


def _marker(count: int, tag: str) -> str:
    return f"    MARKER{count:<2}  'MARKER'                 {tag}"


def _mps(model: MilpModel) -> str:
    names = _mps_names(model)
    sense_tag = {"<=": "L", ">=": "G", "=": "E"}
    lines = [f"NAME          {model.formulation}", "ROWS", " N  obj"]
    for con in model.constraints:
        lines.append(f" {sense_tag[con.sense]}  {con.name}")

    entries: dict[int, list] = {v.vid: [] for v in model.variables}
    for vid, coef in model.objective:
        entries[vid].append(("obj", coef))
    for con in model.constraints:
        for vid, coef in con.coeffs:
            entries[vid].append((con.name, coef))

    lines.append("COLUMNS")
    in_int = False
    markers = 0
    for v in model.variables:
        want_int = v.kind != CONTINUOUS
        if want_int != in_int:
            markers += 1
            lines.append(_marker(markers, "'INTORG'" if want_int else "'INTEND'"))
            in_int = want_int
        col = entries[v.vid] or [("obj", Fraction(0))]
        for row, coef in col:
            lines.append(_entry(names[v.vid], row, coef))
    if in_int:
        markers += 1
        lines.append(_marker(markers, "'INTEND'"))

    lines.append("RHS")
    for con in model.constraints:
        if con.rhs != 0:
            lines.append(_entry("rhs", con.name, con.rhs))

    bounds = []
    for v in model.variables:
        nm = names[v.vid]
        if v.kind == BINARY:
            bounds.append(f" BV bnd       {nm}")
        elif v.kind == INTEGER:
            if v.lb != 0:
                bounds.append(f" LI bnd       {nm:<8}  {_fmt_num(v.lb):>12}")
            if v.ub is not None:
                bounds.append(f" UI bnd       {nm:<8}  {_fmt_num(v.ub):>12}")
        else:
            if v.lb != 0:
                bounds.append(f" LO bnd       {nm:<8}  {_fmt_num(v.lb):>12}")
            if v.ub is not None:
                bounds.append(f" UP bnd       {nm:<8}  {_fmt_num(v.ub):>12}")
    if bounds:
        lines.append("BOUNDS")
        lines.extend(bounds)
    lines.append("ENDATA")
    return "\n".join(lines) + "\n"
