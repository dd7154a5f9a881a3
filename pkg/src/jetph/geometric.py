"""Legendre transform and the bundle-geometric port-Hamiltonian form ẋ = J(δH)."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import NotHyperregularError, StructureError
from .symbolic import (
    DepCoord,
    Expression,
    JetCoordinate,
    Param,
    ZERO,
    is_zero,
    jets,
    normalize,
    partial_jet,
    substitute,
    to_poly,
    total_derivative,
)
from .textio import Chart
from .variational import Density, variational_derivative


@dataclass(frozen=True)
class Momentum:
    dep: DepCoord
    momentum: DepCoord
    definition: Expression  # p_α = ∂^t_α L, in Lagrangian jets
    inverse: Expression  # velocity y^α_t in terms of p_α and configuration jets

    @property
    def symbol(self) -> JetCoordinate:
        return JetCoordinate(self.momentum)


@dataclass(frozen=True)
class MomentumMap:
    lagrangian_chart: Chart
    entries: tuple

    def __iter__(self):
        return iter(self.entries)

    def velocity(self, dep: DepCoord) -> JetCoordinate:
        return JetCoordinate(dep, ((self.lagrangian_chart.time, 1),))

    def round_trip_ok(self) -> bool:
        bindings = {self.velocity(m.dep): m.inverse for m in self.entries}
        return all(is_zero(substitute(m.definition, bindings) - m.symbol) for m in self.entries)

    def momenta_to_velocities(self, expr: Expression) -> Expression:
        """Replace every momentum jet by the matching total derivative of its definition."""
        by_dep = {m.momentum: m for m in self.entries}
        bindings = {}
        for j in jets(expr):
            if j.dep in by_dep:
                repl = by_dep[j.dep].definition
                for coord, n in j.multi_index:
                    for _ in range(n):
                        repl = total_derivative(repl, coord)
                bindings[j] = repl
        return substitute(expr, bindings) if bindings else normalize(expr)


def canonical_matrix(n: int) -> tuple:
    """[[0, I], [-I, 0]] for n configuration variables."""
    rows = []
    for i in range(2 * n):
        row = [Fraction(0)] * (2 * n)
        if i < n:
            row[i + n] = Fraction(1)
        else:
            row[i - n] = Fraction(-1)
        rows.append(tuple(row))
    return tuple(rows)


@dataclass(frozen=True)
class GeometricPH:
    """ẋ = J δH with constant skew J and H a density over the spatial chart."""

    state: tuple
    J: tuple
    H: Density
    n_config: int

    def __post_init__(self):
        n = len(self.state)
        if len(self.J) != n or any(len(r) != n for r in self.J):
            raise StructureError("J must be square with the state dimension")
        for i in range(n):
            for k in range(n):
                if self.J[i][k] + self.J[k][i] != 0:
                    raise StructureError("J is not skew-symmetric")

    @property
    def configurations(self) -> tuple:
        return self.state[: self.n_config]

    @property
    def momenta(self) -> tuple:
        return self.state[self.n_config:]

    def gradient(self) -> list:
        """(δ_q H, ∂_p H); momenta enter H without jets, so δ_p = ∂_p."""
        out = []
        for i, dep in enumerate(self.state):
            if i < self.n_config:
                out.append(variational_derivative(self.H, dep))
            else:
                out.append(partial_jet(self.H.expr, JetCoordinate(dep)))
        return out

    def rhs(self) -> list:
        grad = self.gradient()
        out = []
        for row in self.J:
            total = ZERO
            for c, g in zip(row, grad):
                if c:
                    total = total + g * c
            out.append(normalize(total))
        return out

    def rates(self) -> dict:
        return dict(zip(self.state, self.rhs()))

    def closure_residual(self) -> Expression:
        """Σ (JδH)^α (δH)_α, which vanishes identically by skew-symmetry of J."""
        total = ZERO
        for r, g in zip(self.rhs(), self.gradient()):
            total = total + r * g
        return normalize(total)


@dataclass(frozen=True)
class PowerBalanceForm:
    """Per spatial direction A: Σ_α ẋ^α ∂^A_α H with ẋ taken from ẋ = JδH."""

    facets: dict

    def integrand(self, coord) -> Expression:
        return self.facets.get(coord, ZERO)


def _velocity_hessian(L: Density, velocities: list) -> list:
    return [[partial_jet(partial_jet(L.expr, a), b) for b in velocities] for a in velocities]


def _invertible_monomial(e: Expression) -> bool:
    p = to_poly(e)
    if len(p) != 1:
        return False
    (m, _), = p.items()
    return all(isinstance(s, Param) for s, _ in m)


def legendre_transform(L: Density) -> tuple:
    """Momenta p_α = ∂^t_α L and H = Σ ẏ^α p_α - L on the spatial chart."""
    chart = L.chart
    t = chart.time
    if t is None:
        raise NotHyperregularError("the Lagrangian chart has no time coordinate")
    deps = chart.deps
    velocities = [JetCoordinate(d, ((t, 1),)) for d in deps]
    hess = _velocity_hessian(L, velocities)
    for i, row in enumerate(hess):
        for k, h in enumerate(row):
            if i != k and not is_zero(h):
                raise NotHyperregularError(f"velocity Hessian has off-diagonal entry for ({deps[i].name}, {deps[k].name})")
            if i == k:
                if is_zero(h):
                    raise NotHyperregularError(f"L does not depend quadratically on {velocities[i].label}")
                if jets(h) or not _invertible_monomial(h):
                    raise NotHyperregularError(f"velocity Hessian entry {h} is not an invertible constant")

    n = len(deps)
    mom_deps = tuple(DepCoord(f"p_{d.name}", n + i) for i, d in enumerate(deps))
    entries = []
    for d, v, p, mass in zip(deps, velocities, mom_deps, (hess[i][i] for i in range(n))):
        definition = partial_jet(L.expr, v)
        offset = normalize(definition - mass * v)
        inverse = normalize((JetCoordinate(p) - offset) / mass)
        entries.append(Momentum(d, p, definition, inverse))
    mm = MomentumMap(chart, tuple(entries))
    if not mm.round_trip_ok():
        raise NotHyperregularError("momentum definition could not be inverted")

    legendre = ZERO
    for m, v in zip(entries, velocities):
        legendre = legendre + v * JetCoordinate(m.momentum)
    H_expr = substitute(legendre - L.expr, {v: m.inverse for m, v in zip(entries, velocities)})
    h_chart = Chart(chart.spatial, deps + mom_deps)
    H = Density(h_chart, H_expr)
    return mm, build_geometric_ph(mm, H)


def build_geometric_ph(mm: MomentumMap, H: Density) -> GeometricPH:
    configs = tuple(m.dep for m in mm)
    momenta = tuple(m.momentum for m in mm)
    for j in jets(H.expr):
        if j.dep in momenta and j.order > 0:
            raise StructureError(f"Hamiltonian contains momentum jet {j.label}")
    return GeometricPH(configs + momenta, canonical_matrix(len(configs)), H, len(configs))


def power_balance_form(ph: GeometricPH) -> PowerBalanceForm:
    rates = ph.rates()
    facets = {}
    for coord in ph.H.chart.spatial:
        total = ZERO
        for dep in ph.state:
            coef = partial_jet(ph.H.expr, JetCoordinate(dep, ((coord, 1),)))
            if not is_zero(coef):
                total = total + rates[dep] * coef
        total = normalize(total)
        if not is_zero(total):
            facets[coord] = total
    return PowerBalanceForm(facets)


def eliminate_momenta(ph: GeometricPH, mm: MomentumMap) -> tuple:
    """Substitute p = ∂^t L into ẋ = JδH.

    Returns ``(dynamic, kinematic)``: for each configuration α the residual
    (ṗ_α equation right side) - d_t(p_α definition), comparable to δ_α L, and
    the kinematic residuals ẏ^α - δ_{p_α}H, which must vanish identically.
    """
    rates = ph.rates()
    t = mm.lagrangian_chart.time
    dynamic, kinematic = {}, {}
    for m in mm:
        rhs_p = mm.momenta_to_velocities(rates[m.momentum])
        dynamic[m.dep] = normalize(rhs_p - total_derivative(m.definition, t))
        rhs_q = mm.momenta_to_velocities(rates[m.dep])
        kinematic[m.dep] = normalize(rhs_q - mm.velocity(m.dep))
    return dynamic, kinematic
