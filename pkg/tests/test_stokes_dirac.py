from fractions import Fraction

import pytest

from jetph.errors import NotSkewAdjointError, RepresentationError
from jetph.geometric import power_balance_form
from jetph.mindlin import CHART, REFERENCE_OPERATOR, mindlin_lagrangian, stress_resultants
from jetph.models import load_model
from jetph.checks import operator_matches
from jetph.stokes_dirac import (
    EnergyState,
    EnergyVariable,
    MatrixDiffOperator,
    OperatorEntry,
    build_stokes_dirac,
    compatibility_residuals,
    dirac_power_integrands,
    effort_map,
    expand_dirac_to_displacement,
    formal_adjoint_identity,
    strain_rate_consistency,
)
from jetph.symbolic import (
    ZERO,
    JetCoordinate,
    equivalent,
    evaluate,
    is_zero,
    jet,
    partial_jet,
    substitute,
    total_derivative,
)
from jetph.textio import Chart, parse
from jetph.variational import Density, euler_lagrange


@pytest.fixture(scope="module")
def sd():
    return build_stokes_dirac(load_model("mindlin"))


def P(s):
    return parse(s, CHART)


def test_state_order(sd):
    assert sd.state.names == ["p_w", "Gamma_xz", "Gamma_yz", "p_psi", "p_phi", "Gamma_x", "Gamma_y", "Gamma_xy"]
    assert [v.kind for v in sd.state][:3] == ["momentum", "strain", "strain"]


def test_strain_provenance(sd):
    prov = {v.coord.name: v.provenance for v in sd.state.strains}
    assert equivalent(prov["Gamma_x"], P("-psi_X"))
    assert equivalent(prov["Gamma_y"], P("-phi_Y"))
    assert equivalent(prov["Gamma_xy"], P("-psi_Y - phi_X"))
    assert equivalent(prov["Gamma_xz"], P("w_X - psi"))
    assert equivalent(prov["Gamma_yz"], P("w_Y - phi"))


def test_efforts_are_rates_and_resultants(sd):
    r = stress_resultants()
    e = [substitute(x, sd.to_lagrangian()) for x in sd.efforts]
    expected = [P("w_t"), r.Qx, r.Qy, P("psi_t"), P("phi_t"), -r.Mx, -r.My, -r.Mxy]
    for got, want in zip(e, expected):
        assert equivalent(got, want)


def test_constitutive_closure(sd):
    gx = sd.state.variables[sd.state.index("Gamma_x")].symbol
    gy = sd.state.variables[sd.state.index("Gamma_y")].symbol
    D, nu = parse("D", CHART), parse("nu", CHART)
    # ∂_{Γx} V = -M_x with M_x = -D(Γx + νΓy)
    assert equivalent(partial_jet(sd.H.expr, gx), D * (gx + nu * gy))


def test_operator_matches_reference(sd):
    assert operator_matches(sd.J, REFERENCE_OPERATOR) == []
    assert sd.J.is_formally_skew_adjoint()
    assert len(sd.J.table()) == 8 and all(len(r) == 8 for r in sd.J.table())


def test_zero_effort_gives_zero_rate(sd):
    assert all(is_zero(r) for r in sd.J.apply([ZERO] * 8))


def test_fourth_row(sd):
    """ρh³/12 ψ̈ = Q_x - d_X(-M_x) - d_Y(-M_xy)."""
    dyn, _ = expand_dirac_to_displacement(sd)
    r = stress_resultants()
    X, Y = CHART.coord("X"), CHART.coord("Y")
    expected = r.Qx + total_derivative(r.Mx, X) + total_derivative(r.Mxy, Y) - P("rho*h^3/12*psi_tt")
    assert equivalent(dyn[CHART.dep("psi")], expected)


def test_first_row():
    sd = build_stokes_dirac(load_model("mindlin"))
    dyn, kin = expand_dirac_to_displacement(sd)
    r = stress_resultants()
    X, Y = CHART.coord("X"), CHART.coord("Y")
    assert equivalent(dyn[CHART.dep("w")], total_derivative(r.Qx, X) + total_derivative(r.Qy, Y) - P("rho*h*w_tt"))
    assert all(is_zero(k) for k in kin)


def test_full_expansion_matches_lagrangian(sd):
    dyn, _ = expand_dirac_to_displacement(sd)
    el = euler_lagrange(mindlin_lagrangian())
    for dep in CHART.deps:
        assert equivalent(dyn[dep], el[dep])


def test_strain_rates(sd):
    assert all(is_zero(r) for r in strain_rate_consistency(sd))


def test_compatibility_residuals(sd):
    res = compatibility_residuals(sd.state)
    assert len(res) == 5
    # strains computed by definition
    vals = {JetCoordinate(CHART.dep("w")): Fraction(0)}
    pairs = [("w_X", 2), ("w_Y", -1), ("psi", Fraction(1, 3)), ("phi", 5), ("psi_X", 7), ("psi_Y", -2),
             ("phi_X", 3), ("phi_Y", Fraction(1, 2))]
    jets_vals = {P(name): Fraction(v) for name, v in pairs}
    vals.update(jets_vals)
    for v in sd.state.strains:
        vals[v.symbol] = evaluate(v.provenance, jets_vals, exact=True)
    assert compatibility_residuals(sd.state, vals) == [0] * 5
    gx = sd.state.variables[sd.state.index("Gamma_x")].symbol
    eps = Fraction(1, 1000)
    vals[gx] += eps
    out = compatibility_residuals(sd.state, vals)
    assert out[[v.coord.name for v in sd.state.strains].index("Gamma_x")] == eps


def test_power_agreement(sd):
    B = formal_adjoint_identity(sd.J)
    dp = dirac_power_integrands(sd, B)
    pf = power_balance_form(sd.geometric)
    for A in CHART.spatial:
        assert equivalent(dp[A], pf.integrand(A))


def test_mindlin_bilinear_is_rate_resultant_pairing(sd):
    B = formal_adjoint_identity(sd.J)
    r = stress_resultants()
    e = [substitute(x, sd.to_lagrangian()) for x in sd.efforts]
    X = CHART.coord("X")
    assert equivalent(B.half_quadratic(X, e), P("w_t") * r.Qx + P("psi_t") * r.Mx + P("phi_t") * r.Mxy)


def test_zero_order_skew_has_no_boundary():
    X = Chart.from_names("X", ["a"], time=False).coord("X")
    rows = ((OperatorEntry(), OperatorEntry(Fraction(1))), (OperatorEntry(Fraction(-1)), OperatorEntry()))
    J = MatrixDiffOperator((X,), rows)
    assert formal_adjoint_identity(J).matrices == {}


def test_scalar_derivative_bilinear():
    chart = Chart.from_names("X", ["a", "b"], time=False)
    X = chart.coord("X")
    J = MatrixDiffOperator((X,), ((OperatorEntry(first=((X, Fraction(1)),)),),))
    B = formal_adjoint_identity(J)
    a, b = (JetCoordinate(d) for d in chart.deps)
    assert equivalent(B(X, [a], [b]), a * b)


def test_not_skew_adjoint():
    X = Chart.from_names("X", ["a"], time=False).coord("X")
    dX = OperatorEntry(first=((X, Fraction(1)),))
    J = MatrixDiffOperator((X,), ((OperatorEntry(), dX), (OperatorEntry(), OperatorEntry())))
    assert not J.is_formally_skew_adjoint()
    with pytest.raises(NotSkewAdjointError):
        formal_adjoint_identity(J)


def test_effort_map_rejects_energy_jets():
    chart = Chart.from_names("X", ["g"], time=False)
    g = chart.dep("g")
    state = EnergyState((EnergyVariable(g, "strain", ZERO),))
    with pytest.raises(RepresentationError):
        effort_map(Density(chart, jet(g, chart.coord("X")) ** 2), state)


def test_wave_preset():
    sd = build_stokes_dirac(load_model("wave1d"))
    assert sd.state.names == ["p_w", "eps"]
    dyn, kin = expand_dirac_to_displacement(sd)
    m = load_model("wave1d")
    el = euler_lagrange(m.lagrangian)
    assert equivalent(dyn[m.chart.dep("w")], el[m.chart.dep("w")])
