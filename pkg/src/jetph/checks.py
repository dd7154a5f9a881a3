"""Symbolic verification suite run by the ``check`` command."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import JetPHError
from .geometric import eliminate_momenta, legendre_transform, power_balance_form
from .models import FieldModel
from .stokes_dirac import (
    build_stokes_dirac,
    dirac_power_integrands,
    expand_dirac_to_displacement,
    formal_adjoint_identity,
    strain_rate_consistency,
)
from .symbolic import ZERO, is_zero, jet, normalize, partial_jet
from .textio import to_text
from .variational import euler_lagrange


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}" + (f": {self.detail}" if self.detail else "")


def _difference(a, b) -> str:
    d = normalize(a - b)
    return "" if is_zero(d) else f"difference {to_text(d)}"


_TERM = re.compile(r"([+-]?)\s*(?:(\d+(?:/\d+)?)\s*\*?\s*)?(d([A-Za-z]))?")


def parse_operator_entry(text: str, coords) -> tuple:
    """Entry text such as ``-dX``, ``1`` or ``2*dY - 1`` as (c0, {coord name: c})."""
    names = {c.name for c in coords}
    s = text.replace(" ", "")
    c0, first, pos = Fraction(0), {}, 0
    if s in ("", "0"):
        return c0, first
    while pos < len(s):
        m = _TERM.match(s, pos)
        if not m or m.end() == pos or (m.group(2) is None and m.group(3) is None):
            raise ValueError(f"cannot read operator entry {text!r}")
        sign = -1 if m.group(1) == "-" else 1
        coef = Fraction(m.group(2)) if m.group(2) else Fraction(1)
        if m.group(3):
            if m.group(4) not in names:
                raise ValueError(f"unknown direction in operator entry {text!r}")
            first[m.group(4)] = first.get(m.group(4), 0) + sign * coef
        else:
            c0 += sign * coef
        pos = m.end()
    return c0, first


def operator_matches(J, reference) -> list:
    """Positions (i, k) where ``J`` differs from a textual reference table."""
    bad = []
    if len(reference) != J.size:
        return [("size", len(reference))]
    for i, row in enumerate(reference):
        for k, text in enumerate(row):
            c0, first = parse_operator_entry(text, J.coords)
            e = J.entries[i][k]
            if e.c0 != c0 or any(e.coefficient(c) != first.get(c.name, 0) for c in J.coords):
                bad.append((i, k))
    return bad


def run_checks(model: FieldModel) -> list:
    """All symbolic equivalence checks applicable to ``model``."""
    results = []

    def record(name, fn):
        try:
            detail = fn()
            results.append(CheckResult(name, not detail, detail or ""))
        except JetPHError as exc:
            results.append(CheckResult(name, False, f"{type(exc).__name__}: {exc}"))

    L = model.lagrangian
    el = euler_lagrange(L)

    for r in model.resultants:
        record(
            f"resultant {r.name} = {'-' if r.sign < 0 else ''}dL/d{to_text(r.jet)}",
            lambda r=r: _difference(r.expr, partial_jet(L.expr, r.jet) * r.sign),
        )

    for dep, g in model.golden_residuals.items():
        record(f"euler-lagrange {dep.name} matches reference", lambda dep=dep, g=g: _difference(el[dep], g))

    try:
        mm, ph = legendre_transform(L)
    except JetPHError as exc:
        results.append(CheckResult("legendre transform", False, f"{type(exc).__name__}: {exc}"))
        return results
    results.append(CheckResult("legendre transform", mm.round_trip_ok()))
    record("geometric closure sum (J dH) dH = 0", lambda: _difference(ph.closure_residual(), ZERO))

    h_chart = ph.H.chart
    for dep in L.chart.deps:
        for A in h_chart.spatial:
            j = jet(dep, A)
            record(
                f"sign relation dH/d{j.label} = -dL/d{j.label}",
                lambda j=j: _difference(partial_jet(ph.H.expr, j), -partial_jet(L.expr, j)),
            )

    dyn, kin = eliminate_momenta(ph, mm)
    for dep in L.chart.deps:
        record(f"geometric form reproduces euler-lagrange {dep.name}", lambda dep=dep: _difference(dyn[dep], el[dep]))
        record(f"geometric kinematic relation {dep.name}", lambda dep=dep: _difference(kin[dep], ZERO))

    if not model.strains:
        return results
    try:
        sd = build_stokes_dirac(model)
    except JetPHError as exc:
        results.append(CheckResult("stokes-dirac representation", False, f"{type(exc).__name__}: {exc}"))
        return results
    results.append(CheckResult("stokes-dirac operator formally skew-adjoint", sd.J.is_formally_skew_adjoint()))
    if model.reference_operator:
        bad = operator_matches(sd.J, model.reference_operator)
        results.append(
            CheckResult("stokes-dirac operator matches reference", not bad, f"entries {bad}" if bad else "")
        )
    try:
        B = formal_adjoint_identity(sd.J)
        results.append(CheckResult("integration by parts leaves a divergence", True))
    except JetPHError as exc:
        results.append(CheckResult("integration by parts leaves a divergence", False, str(exc)))
        return results
    d2, k2 = expand_dirac_to_displacement(sd)
    for dep in L.chart.deps:
        record(f"dirac form reproduces euler-lagrange {dep.name}", lambda dep=dep: _difference(d2[dep], el[dep]))
    for v, r in zip(sd.state.strains, k2):
        record(f"dirac strain row {v.coord.name} is a compatibility identity", lambda r=r: _difference(r, ZERO))
    for v, r in zip(sd.state.strains, strain_rate_consistency(sd)):
        record(f"strain rate {v.coord.name} consistent", lambda r=r: _difference(r, ZERO))
    pf = power_balance_form(ph)
    dp = dirac_power_integrands(sd, B)
    for A in h_chart.spatial:
        record(
            f"boundary power on {A.name}-facets agrees",
            lambda A=A: _difference(dp.get(A, ZERO), pf.integrand(A)),
        )
    return results
