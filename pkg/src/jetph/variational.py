"""Variational derivatives, Euler-Lagrange systems and boundary forms.

For a first-order density F dV the decomposition

    j¹(v)(F dV) = v^α δ_α F dV + d_A(v^α ∂^A_α F) dV

splits the first variation into a domain part (the variational derivatives
δ_α F = ∂_α F - d_A ∂^A_α F) and a divergence that integrates to the
boundary.  On a rectangle the boundary integral is a sum over facets; a
facet ``Facet(X, +1)`` (at X = l_x) carries its coefficient with a plus
sign and ``Facet(X, -1)`` (at X = 0) with a minus sign, i.e. the
orientation is by outward normal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import UnknownVariableError
from .symbolic import (
    DepCoord,
    Expression,
    IndepCoord,
    JetCoordinate,
    Param,
    ZERO,
    as_expression,
    is_zero,
    jet,
    jets,
    normalize,
    partial_jet,
    total_derivative,
)
from .textio import Chart


@dataclass(frozen=True)
class Density:
    """A first-order density ``expr · dV`` on ``chart``."""

    chart: Chart
    expr: Expression

    def __post_init__(self):
        expr = normalize(self.expr)
        object.__setattr__(self, "expr", expr)
        deps = set(self.chart.deps)
        indep = set(self.chart.indep)
        for j in jets(expr):
            if j.dep not in deps:
                raise UnknownVariableError(f"{j.label} references undeclared variable {j.dep.name}")
            if any(c not in indep for c, _ in j.multi_index):
                raise UnknownVariableError(f"{j.label} differentiates along an undeclared coordinate")
            if j.order > 1:
                raise ValueError(f"densities must be first order, found {j.label}")


@dataclass(frozen=True)
class Facet:
    """One side of a rectangular domain: ``coord = 0`` (side -1) or ``coord = l`` (side +1)."""

    coord: IndepCoord
    side: int

    def __post_init__(self):
        if self.side not in (-1, 1):
            raise ValueError("facet side must be -1 or +1")

    @property
    def name(self) -> str:
        return f"{self.coord.name.lower()}{0 if self.side < 0 else 1}"


def rectangle_facets(chart: Chart) -> tuple:
    return tuple(Facet(c, s) for c in chart.spatial for s in (-1, 1))


@dataclass(frozen=True)
class ELSystem:
    residuals: dict

    def __getitem__(self, dep: DepCoord) -> Expression:
        return self.residuals[dep]


@dataclass(frozen=True)
class BoundaryForm:
    """Coefficients ∂^A_α F of the boundary operator, per spatial direction A.

    Directions whose coefficients all vanish are omitted.
    """

    chart: Chart
    facets: dict = field(default_factory=dict)

    def coefficient(self, coord: IndepCoord, dep: DepCoord) -> Expression:
        return self.facets.get(coord, {}).get(dep, ZERO)

    def integrand(self, facet: Facet, variation: Mapping[DepCoord, Expression]) -> Expression:
        """Signed facet integrand ``side · v^α ∂^A_α F``."""
        total = ZERO
        for dep, coef in self.facets.get(facet.coord, {}).items():
            total = total + as_expression(variation.get(dep, ZERO)) * coef
        return normalize(total * facet.side)


@dataclass(frozen=True)
class ExternalBoundaryInput:
    """Externally imposed boundary terms F^A_{e,α}, per facet and variable."""

    values: dict = field(default_factory=dict)

    @classmethod
    def symbols(cls, chart: Chart, facets: Iterable[Facet] | None = None) -> "ExternalBoundaryInput":
        """One opaque symbol ``Fe_<facet>_<var>`` per facet and dependent variable."""
        facets = rectangle_facets(chart) if facets is None else facets
        return cls({f: {d: Param(f"Fe_{f.name}_{d.name}") for d in chart.deps} for f in facets})

    def get(self, facet: Facet, dep: DepCoord) -> Expression:
        return self.values.get(facet, {}).get(dep, ZERO)


def _check_dep(density: Density, dep: DepCoord):
    if dep not in density.chart.deps:
        raise UnknownVariableError(f"{dep.name} is not a dependent coordinate of the chart")


def variational_derivative(density: Density, dep: DepCoord) -> Expression:
    """δ_α F = ∂_α F - Σ_A d_A ∂^A_α F over all independent coordinates of the chart."""
    _check_dep(density, dep)
    out = partial_jet(density.expr, JetCoordinate(dep))
    for coord in density.chart.indep:
        out = out - total_derivative(partial_jet(density.expr, jet(dep, coord)), coord)
    return normalize(out)


def euler_lagrange(density: Density) -> ELSystem:
    return ELSystem({d: variational_derivative(density, d) for d in density.chart.deps})


def boundary_form(density: Density) -> BoundaryForm:
    """Spatial facet coefficients ∂^A_α F; time facets carry no variation and are dropped."""
    facets = {}
    for coord in density.chart.spatial:
        coefs = {}
        for dep in density.chart.deps:
            c = partial_jet(density.expr, jet(dep, coord))
            if not is_zero(c):
                coefs[dep] = c
        if coefs:
            facets[coord] = coefs
    return BoundaryForm(density.chart, facets)


def boundary_balance(bf: BoundaryForm, ext: ExternalBoundaryInput | None = None) -> dict:
    """Per facet and variable: ∂^A_α F - F^A_{e,α}."""
    ext = ext or ExternalBoundaryInput()
    out = {}
    for facet in rectangle_facets(bf.chart):
        out[facet] = {
            dep: normalize(bf.coefficient(facet.coord, dep) - ext.get(facet, dep)) for dep in bf.chart.deps
        }
    return out


def is_admissible(balance: Mapping, pinned: Mapping[Facet, Iterable[DepCoord]]) -> bool:
    """Each (facet, variable) is either pinned (v^α = 0) or has a vanishing balance."""
    for facet, per_dep in balance.items():
        fixed = set(pinned.get(facet, ()))
        for dep, coef in per_dep.items():
            if dep not in fixed and not is_zero(coef):
                return False
    return True


def first_variation(density: Density, variation: Mapping[DepCoord, Expression]) -> Expression:
    """Integrand of j¹(v)(F dV): v^α ∂_α F + d_A(v^α) ∂^A_α F."""
    total = ZERO
    for dep in density.chart.deps:
        v = as_expression(variation.get(dep, ZERO))
        total = total + v * partial_jet(density.expr, JetCoordinate(dep))
        for coord in density.chart.indep:
            total = total + total_derivative(v, coord) * partial_jet(density.expr, jet(dep, coord))
    return normalize(total)
