"""Stokes-Dirac representation χ̇ = J_SD ∂_χ H in energy variables.

The energy state consists of the temporal momenta and a list of strain
variables, each a linear combination of first-order configuration jets.
The operator J_SD follows from the strain definitions alone: if
Γ_s = Σ c0·y^α + Σ c_A·y^α_A, then the strain row reads
Γ̇_s = (c0 + c_A d_A) e_α and, by formal skew-adjointness, the momentum row
receives (-c0 + c_A d_A) e_s.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import NotSkewAdjointError, RepresentationError, StructureError
from .geometric import GeometricPH, MomentumMap, legendre_transform
from .symbolic import (
    Const,
    DepCoord,
    Expression,
    IndepCoord,
    JetCoordinate,
    ZERO,
    evaluate,
    is_zero,
    jets,
    normalize,
    partial_jet,
    substitute,
    symbol_key,
    to_poly,
    total_derivative,
)
from .textio import Chart
from .variational import Density


@dataclass(frozen=True)
class EnergyVariable:
    coord: DepCoord
    kind: str  # "momentum" or "strain"
    provenance: Expression

    @property
    def symbol(self) -> JetCoordinate:
        return JetCoordinate(self.coord)


@dataclass(frozen=True)
class EnergyState:
    variables: tuple

    def __iter__(self):
        return iter(self.variables)

    def __len__(self):
        return len(self.variables)

    @property
    def names(self) -> list:
        return [v.coord.name for v in self.variables]

    @property
    def momenta(self) -> list:
        return [v for v in self.variables if v.kind == "momentum"]

    @property
    def strains(self) -> list:
        return [v for v in self.variables if v.kind == "strain"]

    def index(self, name: str) -> int:
        return self.names.index(name)


@dataclass(frozen=True)
class OperatorEntry:
    """Scalar operator c0 + Σ_A c_A d_A with rational constants."""

    c0: Fraction = Fraction(0)
    first: tuple = ()  # ((IndepCoord, Fraction), ...)

    def coefficient(self, coord: IndepCoord) -> Fraction:
        for c, v in self.first:
            if c == coord:
                return v
        return Fraction(0)

    @property
    def is_zero(self) -> bool:
        return self.c0 == 0 and all(v == 0 for _, v in self.first)

    def apply(self, e: Expression) -> Expression:
        out = e * self.c0 if self.c0 else ZERO
        for coord, v in self.first:
            if v:
                out = out + total_derivative(e, coord) * v
        return out


@dataclass(frozen=True)
class MatrixDiffOperator:
    coords: tuple
    entries: tuple

    @property
    def size(self) -> int:
        return len(self.entries)

    def zero_order(self) -> list:
        return [[e.c0 for e in row] for row in self.entries]

    def first_order(self, coord: IndepCoord) -> list:
        return [[e.coefficient(coord) for e in row] for row in self.entries]

    def apply(self, efforts: Sequence[Expression]) -> list:
        out = []
        for row in self.entries:
            total = ZERO
            for entry, e in zip(row, efforts):
                if not entry.is_zero:
                    total = total + entry.apply(e)
            out.append(normalize(total))
        return out

    def is_formally_skew_adjoint(self) -> bool:
        n = self.size
        a = self.zero_order()
        bs = [self.first_order(c) for c in self.coords]
        return all(a[i][k] == -a[k][i] for i in range(n) for k in range(n)) and all(
            b[i][k] == b[k][i] for b in bs for i in range(n) for k in range(n)
        )

    def table(self) -> list:
        rows = []
        for row in self.entries:
            cells = []
            for e in row:
                cell = {"c0": str(e.c0)}
                for c in self.coords:
                    cell[f"c{c.name}"] = str(e.coefficient(c))
                cells.append(cell)
            rows.append(cells)
        return rows


@dataclass(frozen=True)
class BoundaryBilinear:
    """Facet bilinear forms B_A(e, e') = eᵀ B_A e' from integration by parts."""

    matrices: dict  # IndepCoord -> tuple of tuples of Fraction

    def __call__(self, coord: IndepCoord, e1: Sequence, e2: Sequence) -> Expression:
        B = self.matrices.get(coord)
        if B is None:
            return ZERO
        total = ZERO
        for i, row in enumerate(B):
            for k, c in enumerate(row):
                if c:
                    total = total + e1[i] * e2[k] * c
        return normalize(total)

    def half_quadratic(self, coord: IndepCoord, e: Sequence) -> Expression:
        return normalize(self(coord, e, e) * Fraction(1, 2))


@dataclass(frozen=True)
class StokesDiracSystem:
    state: EnergyState
    H: Density
    efforts: tuple
    J: MatrixDiffOperator
    stiffness: tuple
    momentum_map: MomentumMap
    geometric: GeometricPH
    strain_jets: tuple = field(default=())

    def rhs(self) -> list:
        return self.J.apply(self.efforts)

    def to_configuration(self) -> dict:
        """Bindings sending energy variables to (momenta, configuration jets)."""
        return {v.symbol: v.provenance for v in self.state.strains}

    def to_lagrangian(self) -> dict:
        """Bindings sending energy variables to Lagrangian velocities and jets."""
        b = self.to_configuration()
        for v in self.state.momenta:
            b[v.symbol] = v.provenance
        return b


# ---------------------------------------------------------------------------


def _solve_right_inverse(C: list) -> list:
    """R with C R = I for a full-row-rank rational matrix, R = Cᵀ (C Cᵀ)⁻¹."""
    m, n = len(C), len(C[0]) if C else 0
    G = [[sum(C[i][k] * C[j][k] for k in range(n)) for j in range(m)] for i in range(m)]
    aug = [row[:] + [Fraction(int(i == j)) for j in range(m)] for i, row in enumerate(G)]
    for col in range(m):
        piv = next((r for r in range(col, m) if aug[r][col] != 0), None)
        if piv is None:
            raise RepresentationError("strain definitions are linearly dependent")
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [x / p for x in aug[col]]
        for r in range(m):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    Ginv = [row[m:] for row in aug]
    return [[sum(C[i][k] * Ginv[i][j] for i in range(m)) for j in range(m)] for k in range(n)]


def strain_matrix(strains: Sequence[Expression]) -> tuple:
    """Rational coefficient matrix of linear strain definitions and its jet basis."""
    rows, basis = [], set()
    for s in strains:
        row = {}
        for m, c in to_poly(s).items():
            if len(m) != 1 or m[0][1] != 1 or not isinstance(m[0][0], JetCoordinate):
                raise StructureError(f"strain {s} is not linear in configuration jets with rational coefficients")
            j = m[0][0]
            if j.order > 1:
                raise StructureError(f"strain {s} uses a jet of order > 1")
            row[j] = c
            basis.add(j)
        rows.append(row)
    basis = tuple(sorted(basis, key=symbol_key))
    return [[r.get(j, Fraction(0)) for j in basis] for r in rows], basis


def effort_map(H: Density, state: EnergyState) -> tuple:
    """e = ∂_χ H; energy variables must enter H algebraically."""
    names = {v.coord for v in state}
    for j in jets(H.expr):
        if j.dep in names and j.order > 0:
            raise RepresentationError(f"Hamiltonian contains jet {j.label} of an energy variable")
    return tuple(partial_jet(H.expr, v.symbol) for v in state)


def build_stokes_dirac(model) -> StokesDiracSystem:
    """Energy state, effort map and J_SD for a model with strain definitions.

    ``model`` provides ``lagrangian`` (a :class:`Density`), ``strains`` (a
    sequence of ``(name, Expression)``) and optionally ``state_order``.
    """
    L: Density = model.lagrangian
    mm, geo = legendre_transform(L)
    chart = L.chart
    n_cfg = len(chart.deps)

    strain_defs = [normalize(e) for _, e in model.strains]
    C, basis = strain_matrix(strain_defs)
    for j in basis:
        if j.dep not in chart.deps or chart.time in {c for c, _ in j.multi_index}:
            raise StructureError(f"strain jet {j.label} is not a spatial configuration jet")
    R = _solve_right_inverse(C)

    strain_coords = [DepCoord(name, 2 * n_cfg + i) for i, (name, _) in enumerate(model.strains)]
    strain_syms = [JetCoordinate(d) for d in strain_coords]

    bindings = {}
    for k, j in enumerate(basis):
        total = ZERO
        for s, r in enumerate(R[k]):
            if r:
                total = total + strain_syms[s] * r
        bindings[j] = total
    H_energy = substitute(geo.H.expr, bindings)

    energy_deps = {m.momentum for m in mm} | set(strain_coords)
    leftovers = [j for j in jets(H_energy) if j.dep not in energy_deps]
    if leftovers:
        raise RepresentationError(
            "Hamiltonian does not factor through the strain map; remaining jets: "
            + ", ".join(sorted(j.label for j in leftovers))
        )
    back = substitute(H_energy, dict(zip(strain_syms, strain_defs)))
    if not is_zero(back - geo.H.expr):
        raise RepresentationError("Hamiltonian is not a function of the strains and momenta")

    variables = {m.momentum.name: EnergyVariable(m.momentum, "momentum", m.definition) for m in mm}
    for d, e in zip(strain_coords, strain_defs):
        variables[d.name] = EnergyVariable(d, "strain", e)
    order = list(getattr(model, "state_order", None) or variables)
    if sorted(order) != sorted(variables):
        raise StructureError(f"state order {order} does not list exactly {sorted(variables)}")
    state = EnergyState(tuple(variables[n] for n in order))
    energy_chart = Chart(chart.spatial, tuple(v.coord for v in state))
    H = Density(energy_chart, H_energy)
    efforts = effort_map(H, state)

    # J_SD from the strain coefficients
    pos = {v.coord: i for i, v in enumerate(state)}
    mom_of = {m.dep: m.momentum for m in mm}
    size = len(state)
    grid = [[OperatorEntry() for _ in range(size)] for _ in range(size)]
    spatial = chart.spatial
    for s_idx, (coord, row) in enumerate(zip(strain_coords, C)):
        per_dep: dict = {}
        for j, c in zip(basis, row):
            if not c:
                continue
            c0, first = per_dep.get(j.dep, (Fraction(0), {}))
            if j.order == 0:
                c0 += c
            else:
                (A, _), = j.multi_index
                first = dict(first)
                first[A] = first.get(A, Fraction(0)) + c
            per_dep[j.dep] = (c0, first)
        for dep, (c0, first) in per_dep.items():
            s, p = pos[coord], pos[mom_of[dep]]
            ff = tuple((A, first.get(A, Fraction(0))) for A in spatial)
            grid[s][p] = OperatorEntry(c0, ff)
            grid[p][s] = OperatorEntry(-c0, ff)
    J = MatrixDiffOperator(spatial, tuple(tuple(r) for r in grid))

    K = tuple(
        tuple(partial_jet(partial_jet(H_energy, a), b) for b in strain_syms) for a in strain_syms
    )
    return StokesDiracSystem(state, H, efforts, J, K, mm, geo, basis)


def formal_adjoint_identity(J: MatrixDiffOperator) -> BoundaryBilinear:
    """Integrate e₁ᵀ(J e₂) + e₂ᵀ(J e₁) by parts.

    The domain integrand must equal Σ_A d_A(e₁ᵀ B_A e₂) with B_A the
    first-order coefficient matrices; otherwise :class:`NotSkewAdjointError`.
    """
    n = J.size
    u = [JetCoordinate(DepCoord(f"u{i + 1}", i)) for i in range(n)]
    v = [JetCoordinate(DepCoord(f"v{i + 1}", n + i)) for i in range(n)]
    Ju, Jv = J.apply(u), J.apply(v)
    S = ZERO
    for i in range(n):
        S = S + u[i] * Jv[i] + v[i] * Ju[i]
    matrices = {}
    flux_div = ZERO
    for coord in J.coords:
        b = J.first_order(coord)
        sym = tuple(tuple((b[i][k] + b[k][i]) / 2 for k in range(n)) for i in range(n))
        if any(x for row in sym for x in row):
            matrices[coord] = sym
        flux = ZERO
        for i in range(n):
            for k in range(n):
                if sym[i][k]:
                    flux = flux + u[i] * v[k] * sym[i][k]
        flux_div = flux_div + total_derivative(flux, coord)
    remainder = normalize(S - flux_div)
    if not is_zero(remainder):
        raise NotSkewAdjointError(f"domain remainder is not a divergence: {remainder}")
    return BoundaryBilinear(matrices)


def compatibility_residuals(state: EnergyState, values: Mapping | None = None) -> list:
    """Γ_s - (strain definition); evaluated at ``values`` when given."""
    res = [normalize(v.symbol - v.provenance) for v in state.strains]
    if values is None:
        return res
    return [evaluate(r, values) for r in res]


def strain_rate_consistency(system: StokesDiracSystem) -> list:
    """d_t(strain definition) - (J_SD e)_s with efforts in Lagrangian variables; all zero."""
    t = system.momentum_map.lagrangian_chart.time
    rows = system.J.apply([substitute(e, system.to_lagrangian()) for e in system.efforts])
    out = []
    for i, v in enumerate(system.state):
        if v.kind == "strain":
            out.append(normalize(total_derivative(v.provenance, t) - rows[i]))
    return out


def expand_dirac_to_displacement(system: StokesDiracSystem) -> tuple:
    """Eliminate energy variables from χ̇ = J_SD e.

    Returns ``(dynamic, kinematic)``: residuals per configuration variable,
    comparable to δ_α L, and the strain-row residuals, which vanish.
    """
    t = system.momentum_map.lagrangian_chart.time
    rows = system.J.apply([substitute(e, system.to_lagrangian()) for e in system.efforts])
    dep_of = {m.momentum: m.dep for m in system.momentum_map}
    dynamic, kinematic = {}, []
    for i, v in enumerate(system.state):
        rate = total_derivative(v.provenance, t)
        r = normalize(rows[i] - rate)
        if v.kind == "momentum":
            dynamic[dep_of[v.coord]] = r
        else:
            kinematic.append(r)
    return dynamic, kinematic


def dirac_power_integrands(system: StokesDiracSystem, B: BoundaryBilinear | None = None) -> dict:
    """½ B_A(e, e) per spatial direction, rewritten in momenta and configuration jets."""
    B = B or formal_adjoint_identity(system.J)
    conf = system.to_configuration()
    e = [substitute(x, conf) for x in system.efforts]
    return {coord: B.half_quadratic(coord, e) for coord in B.matrices}
