from fractions import Fraction

import pytest

from jetph.errors import NotHyperregularError, StructureError
from jetph.geometric import (
    build_geometric_ph,
    canonical_matrix,
    eliminate_momenta,
    legendre_transform,
    power_balance_form,
)
from jetph.mindlin import CHART, kinetic_density, mindlin_lagrangian, potential_density, stress_resultants
from jetph.symbolic import JetCoordinate, ZERO, equivalent, is_zero, jet, partial_jet, substitute
from jetph.textio import Chart, parse
from jetph.variational import Density, euler_lagrange

WAVE = Chart.from_names("tX", ["w"])


@pytest.fixture(scope="module")
def mindlin():
    return legendre_transform(mindlin_lagrangian())


def H_text(ph, s):
    return parse(s, ph.H.chart)


def test_momenta(mindlin):
    mm, _ = mindlin
    defs = {m.momentum.name: m.definition for m in mm}
    assert equivalent(defs["p_w"], parse("rho*h*w_t", CHART))
    assert equivalent(defs["p_psi"], parse("rho*h^3/12*psi_t", CHART))
    assert equivalent(defs["p_phi"], parse("rho*h^3/12*phi_t", CHART))
    assert mm.round_trip_ok()


def test_hamiltonian_is_kinetic_plus_potential(mindlin):
    mm, ph = mindlin
    H_lagr = mm.momenta_to_velocities(ph.H.expr)
    assert equivalent(H_lagr, kinetic_density() + potential_density())


def test_wave_hamiltonian():
    mm, ph = legendre_transform(Density(WAVE, parse("1/2*w_t^2 - 1/2*w_X^2", WAVE)))
    assert equivalent(ph.H.expr, H_text(ph, "1/2*p_w^2 + 1/2*w_X^2"))
    pf = power_balance_form(ph)
    X = ph.H.chart.coord("X")
    # ẇ w_X with ẇ = p_w
    assert equivalent(pf.integrand(X), H_text(ph, "p_w*w_X"))


def test_degenerate_lagrangian():
    with pytest.raises(NotHyperregularError):
        legendre_transform(Density(WAVE, parse("w_X^2", WAVE)))
    two = Chart.from_names("tX", ["u", "v"])
    with pytest.raises(NotHyperregularError):
        legendre_transform(Density(two, parse("u_t*v_t", two)))


def test_canonical_J(mindlin):
    _, ph = mindlin
    J = ph.J
    assert J == canonical_matrix(3)
    n = len(J)
    assert all(J[i][k] == -J[k][i] for i in range(n) for k in range(n))
    assert J[0][3] == Fraction(1) and J[3][0] == Fraction(-1)


def test_state_order(mindlin):
    _, ph = mindlin
    assert [d.name for d in ph.state] == ["w", "psi", "phi", "p_w", "p_psi", "p_phi"]


def test_momentum_jets_rejected(mindlin):
    mm, ph = mindlin
    X = ph.H.chart.coord("X")
    bad = Density(ph.H.chart, ph.H.expr + jet(ph.momenta[0], X) ** 2)
    with pytest.raises(StructureError):
        build_geometric_ph(mm, bad)


def test_rate_equations(mindlin):
    mm, ph = mindlin
    rates = ph.rates()
    w, psi = ph.state[0], ph.state[1]
    assert equivalent(rates[w], H_text(ph, "p_w/(rho*h)"))
    # ṗ_ψ = -δ_ψ H
    from jetph.variational import variational_derivative

    assert equivalent(rates[ph.momenta[1]], -variational_derivative(ph.H, psi))


def test_elimination_reproduces_euler_lagrange(mindlin):
    mm, ph = mindlin
    dyn, kin = eliminate_momenta(ph, mm)
    el = euler_lagrange(mindlin_lagrangian())
    for dep in CHART.deps:
        assert equivalent(dyn[dep], el[dep])
        assert is_zero(kin[dep])


def test_sign_relation(mindlin):
    _, ph = mindlin
    L = mindlin_lagrangian()
    for dep in CHART.deps:
        for A in ph.H.chart.spatial:
            assert equivalent(partial_jet(ph.H.expr, jet(dep, A)), -partial_jet(L.expr, jet(dep, A)))


def test_resultants_from_hamiltonian(mindlin):
    mm, ph = mindlin
    r = stress_resultants()
    X, Y = ph.H.chart.spatial
    w, psi = ph.state[0], ph.state[1]
    back = mm.momenta_to_velocities
    assert equivalent(back(partial_jet(ph.H.expr, jet(w, X))), r.Qx)
    assert equivalent(back(partial_jet(ph.H.expr, jet(psi, X))), r.Mx)
    assert equivalent(back(partial_jet(ph.H.expr, jet(psi, Y))), r.Mxy)


def test_closure(mindlin):
    _, ph = mindlin
    assert is_zero(ph.closure_residual())


def test_mindlin_power_integrand(mindlin):
    mm, ph = mindlin
    pf = power_balance_form(ph)
    r = stress_resultants()
    X, Y = ph.H.chart.spatial
    P = lambda s: parse(s, CHART)  # noqa: E731
    expected_x = P("w_t") * r.Qx + P("psi_t") * r.Mx + P("phi_t") * r.Mxy
    expected_y = P("w_t") * r.Qy + P("psi_t") * r.Mxy + P("phi_t") * r.My
    assert equivalent(mm.momenta_to_velocities(pf.integrand(X)), expected_x)
    assert equivalent(mm.momenta_to_velocities(pf.integrand(Y)), expected_y)


def test_jet_free_hamiltonian_has_no_port():
    chart = Chart.from_names("tX", ["q"])
    _, ph = legendre_transform(Density(chart, parse("1/2*m*q_t^2 - 1/2*c*q^2", chart)))
    assert power_balance_form(ph).facets == {}
