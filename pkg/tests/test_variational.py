import random

import numpy as np
import pytest
from hypothesis import given, settings

from jetph.errors import UnknownVariableError
from jetph.mindlin import CHART, golden_residuals, mindlin_lagrangian, stress_resultants
from jetph.oracles import TrigField, decomposition_error, random_quadratic_density
from jetph.symbolic import ZERO, DepCoord, equivalent, is_zero, total_derivative
from jetph.textio import Chart, parse
from jetph.variational import (
    Density,
    ExternalBoundaryInput,
    boundary_balance,
    boundary_form,
    euler_lagrange,
    is_admissible,
    rectangle_facets,
    variational_derivative,
)

from strategies import CHART as SCHART, X, expressions

WAVE = Chart.from_names("tX", ["w"])


def P(s, chart=CHART):
    return parse(s, chart)


def test_single_term_variational_derivative():
    d = Density(CHART, P("1/2*D*psi_X^2"))
    assert equivalent(variational_derivative(d, CHART.dep("psi")), P("-D*psi_XX"))


def test_mindlin_w_residual():
    el = euler_lagrange(mindlin_lagrangian())
    assert equivalent(el[CHART.dep("w")], P("-rho*h*w_tt + k*G*h*(w_XX - psi_X) + k*G*h*(w_YY - phi_Y)"))


def test_mindlin_psi_residual():
    el = euler_lagrange(mindlin_lagrangian())
    expected = P("-rho*h^3/12*psi_tt + k*G*h*(w_X - psi) + D*(psi_XX + nu*phi_XY) + 1/2*D*(1 - nu)*(psi_YY + phi_XY)")
    assert equivalent(el[CHART.dep("psi")], expected)


def test_mindlin_matches_golden():
    el = euler_lagrange(mindlin_lagrangian())
    for dep, g in golden_residuals().items():
        assert equivalent(el[dep], g)


def test_wave_equation():
    el = euler_lagrange(Density(WAVE, P("1/2*w_t^2 - 1/2*w_X^2", WAVE)))
    assert equivalent(el[WAVE.dep("w")], P("-w_tt + w_XX", WAVE))


def test_field_free_density():
    el = euler_lagrange(Density(CHART, P("rho*h")))
    assert all(is_zero(r) for r in el.residuals.values())
    assert boundary_form(Density(CHART, P("rho*h"))).facets == {}


def test_unknown_variable():
    with pytest.raises(UnknownVariableError):
        variational_derivative(Density(WAVE, P("w_X^2", WAVE)), DepCoord("q", 7))


def test_mindlin_boundary_form():
    bf = boundary_form(mindlin_lagrangian())
    r = stress_resultants()
    Xc, Yc = CHART.coord("X"), CHART.coord("Y")
    w, psi, phi = CHART.deps
    assert equivalent(bf.coefficient(Xc, w), -r.Qx)
    assert equivalent(bf.coefficient(Xc, psi), -r.Mx)
    assert equivalent(bf.coefficient(Xc, phi), -r.Mxy)
    assert equivalent(bf.coefficient(Yc, w), -r.Qy)
    assert equivalent(bf.coefficient(Yc, psi), -r.Mxy)
    assert equivalent(bf.coefficient(Yc, phi), -r.My)
    assert CHART.coord("t") not in bf.facets


def test_wave_boundary_form():
    bf = boundary_form(Density(WAVE, P("1/2*w_t^2 - 1/2*w_X^2", WAVE)))
    assert equivalent(bf.coefficient(WAVE.coord("X"), WAVE.dep("w")), P("-w_X", WAVE))


def test_facet_orientation():
    names = {f.name: f.side for f in rectangle_facets(CHART)}
    assert names == {"x0": -1, "x1": 1, "y0": -1, "y1": 1}


def test_boundary_balance_and_admissibility():
    bf = boundary_form(mindlin_lagrangian())
    bal = boundary_balance(bf)
    for facet, per in bal.items():
        for dep, c in per.items():
            assert equivalent(c, bf.coefficient(facet.coord, dep))
    facets = rectangle_facets(CHART)
    assert is_admissible(bal, {f: CHART.deps for f in facets})
    assert not is_admissible(bal, {})
    ext = ExternalBoundaryInput({f: {d: bf.coefficient(f.coord, d) for d in CHART.deps} for f in facets})
    assert is_admissible(boundary_balance(bf, ext), {})


def test_external_symbols_stay_on_boundary():
    ext = ExternalBoundaryInput.symbols(CHART)
    bal = boundary_balance(boundary_form(mindlin_lagrangian()), ext)
    x1 = next(f for f in rectangle_facets(CHART) if f.name == "x1")
    assert "Fe_x1_w" in str(bal[x1][CHART.dep("w")])
    el = euler_lagrange(mindlin_lagrangian())
    assert all("Fe_" not in str(r) for r in el.residuals.values())


@settings(max_examples=30, deadline=None)
@given(expressions(max_order=0))
def test_null_lagrangian(g):
    d = Density(SCHART, total_derivative(g, X))
    for dep in SCHART.deps:
        assert is_zero(variational_derivative(d, dep))


def test_decomposition_converges():
    chart = Chart.from_names("XY", ["u", "v"], time=False)
    rng, nrng = random.Random(3), np.random.default_rng(3)
    density = random_quadratic_density(rng, chart)
    fields = {d.name: TrigField.random(nrng, kmax=3) for d in chart.deps}
    var = {d.name: TrigField.random(nrng, kmax=3) for d in chart.deps}
    e16, t16 = decomposition_error(density, fields, var, 16)
    e32, t32 = decomposition_error(density, fields, var, 32)
    assert e16 <= t16 and e32 <= t32
    assert e32 < e16
