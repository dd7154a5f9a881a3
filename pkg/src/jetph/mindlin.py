"""The Mindlin plate: parameters, energy densities, stress resultants and reference expressions."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

from .errors import ConfigError
from .symbolic import Expression, Param, normalize, partial_jet, substitute
from .textio import Chart, parse
from .variational import Density

CHART = Chart.from_names("tXY", ["w", "psi", "phi"])

KINETIC = "rho/2*(h^3/12*(psi_t^2 + phi_t^2) + h*w_t^2)"
POTENTIAL = (
    "1/2*k*G*h*((w_X - psi)^2 + (w_Y - phi)^2)"
    " + 1/2*D*(1 - nu)/2*(psi_Y + phi_X)^2"
    " + 1/2*(D*(psi_X^2 + nu*phi_Y*psi_X) + D*(phi_Y^2 + nu*phi_Y*psi_X))"
)

# (name, expression, jet, sign): resultant = sign * ∂L/∂jet
RESULTANTS = (
    ("M_x", "D*(psi_X + nu*phi_Y)", "psi_X", -1),
    ("M_y", "D*(phi_Y + nu*psi_X)", "phi_Y", -1),
    ("M_xy", "D*(1 - nu)/2*(psi_Y + phi_X)", "psi_Y", -1),
    ("M_xy", "D*(1 - nu)/2*(psi_Y + phi_X)", "phi_X", -1),
    ("Q_x", "k*G*h*(w_X - psi)", "w_X", -1),
    ("Q_y", "k*G*h*(w_Y - phi)", "w_Y", -1),
)

# right-hand side minus left-hand side of the equations of motion
GOLDEN_RESIDUALS = {
    "w": "-rho*h*w_tt + k*G*h*(w_XX - psi_X) + k*G*h*(w_YY - phi_Y)",
    "psi": "-rho*h^3/12*psi_tt + k*G*h*(w_X - psi) + D*(psi_XX + nu*phi_XY) + 1/2*D*(1 - nu)*(psi_YY + phi_XY)",
    "phi": "-rho*h^3/12*phi_tt + k*G*h*(w_Y - phi) + D*(phi_YY + nu*psi_XY) + 1/2*D*(1 - nu)*(psi_XY + phi_XX)",
}

STRAINS = (
    ("Gamma_xz", "w_X - psi"),
    ("Gamma_yz", "w_Y - phi"),
    ("Gamma_x", "-psi_X"),
    ("Gamma_y", "-phi_Y"),
    ("Gamma_xy", "-(psi_Y + phi_X)"),
)

STATE_ORDER = ("p_w", "Gamma_xz", "Gamma_yz", "p_psi", "p_phi", "Gamma_x", "Gamma_y", "Gamma_xy")

# reference operator in the state order above; "dX" and "dY" are total derivatives
REFERENCE_OPERATOR = (
    ("0", "dX", "dY", "0", "0", "0", "0", "0"),
    ("dX", "0", "0", "-1", "0", "0", "0", "0"),
    ("dY", "0", "0", "0", "-1", "0", "0", "0"),
    ("0", "1", "0", "0", "0", "-dX", "0", "-dY"),
    ("0", "0", "1", "0", "0", "0", "-dY", "-dX"),
    ("0", "0", "0", "-dX", "0", "0", "0", "0"),
    ("0", "0", "0", "0", "-dY", "0", "0", "0"),
    ("0", "0", "0", "-dY", "-dX", "0", "0", "0"),
)


def shear_correction() -> float:
    return math.pi ** 2 / 12


def classical_bending_stiffness(E: float, h: float, nu: float) -> float:
    """D = E h³ / (12 (1 - ν²)); a common convention, not required by the model."""
    return E * h ** 3 / (12 * (1 - nu ** 2))


@dataclass(frozen=True)
class PlateParams:
    rho: float
    h: float
    G: float
    D: float
    nu: float
    k: float = field(default_factory=shear_correction)
    lx: float = 1.0
    ly: float = 1.0

    def __post_init__(self):
        for name in ("rho", "h", "G", "D", "k", "lx", "ly"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ConfigError(f"plate parameter {name} must be positive, got {v!r}")
        if not 0 <= self.nu < 0.5:
            raise ConfigError(f"Poisson ratio must lie in [0, 0.5), got {self.nu!r}")

    @classmethod
    def steel(cls, h: float = 0.01, lx: float = 1.0, ly: float = 1.0) -> "PlateParams":
        E, nu = 210e9, 0.3
        return cls(7850.0, h, E / (2 * (1 + nu)), classical_bending_stiffness(E, h, nu), nu, lx=lx, ly=ly)

    @classmethod
    def test_plate(cls, h: float = 0.1, lx: float = 1.0, ly: float = 1.0) -> "PlateParams":
        """Nondimensional thick plate with ρ = G = 1, used by the numerical tests."""
        G, nu = 1.0, 0.3
        return cls(1.0, h, G, classical_bending_stiffness(2 * G * (1 + nu), h, nu), nu, lx=lx, ly=ly)

    @classmethod
    def from_dict(cls, d: dict) -> "PlateParams":
        known = {"rho", "h", "G", "D", "nu", "k", "lx", "ly"}
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown plate parameters: {sorted(extra)}")
        missing = {"rho", "h", "G", "D", "nu"} - set(d)
        if missing:
            raise ConfigError(f"missing plate parameters: {sorted(missing)}")
        return cls(**{k: float(v) for k, v in d.items()})

    def to_dict(self) -> dict:
        return asdict(self)

    def symbol_values(self) -> dict:
        """Numeric bindings for the symbolic parameters."""
        return {Param(n): getattr(self, n) for n in ("rho", "h", "G", "D", "nu", "k")}

    @property
    def masses(self) -> tuple:
        """Inertia per unit area for (w, ψ, φ)."""
        return (self.rho * self.h, self.rho * self.h ** 3 / 12, self.rho * self.h ** 3 / 12)

    @property
    def shear_stiffness(self) -> float:
        return self.k * self.G * self.h


@dataclass(frozen=True)
class StressResultants:
    Mx: Expression
    My: Expression
    Mxy: Expression
    Qx: Expression
    Qy: Expression


def kinetic_density() -> Expression:
    return parse(KINETIC, CHART)


def potential_density() -> Expression:
    return parse(POTENTIAL, CHART)


def mindlin_lagrangian(p: PlateParams | None = None, numeric: bool = False) -> Density:
    """L = K - V on (t, X, Y; w, ψ, φ).

    Parameters stay symbolic unless ``numeric`` is set, in which case the
    values of ``p`` are bound.
    """
    expr = normalize(kinetic_density() - potential_density())
    if numeric:
        if p is None:
            raise ConfigError("numeric Lagrangian requires plate parameters")
        from fractions import Fraction

        expr = substitute(expr, {k: Fraction(v) for k, v in p.symbol_values().items()})
    return Density(CHART, expr)


def stress_resultants(p: PlateParams | None = None) -> StressResultants:
    exprs = {name: parse(text, CHART) for name, text, _, _ in RESULTANTS}
    return StressResultants(exprs["M_x"], exprs["M_y"], exprs["M_xy"], exprs["Q_x"], exprs["Q_y"])


def resultant_identities(L: Density | None = None) -> list:
    """(name, jet label, resultant, sign·∂L/∂jet) for every stress-resultant relation."""
    L = L or mindlin_lagrangian()
    out = []
    for name, text, jet_text, sign in RESULTANTS:
        j = parse(jet_text, CHART)
        out.append((name, jet_text, parse(text, CHART), normalize(partial_jet(L.expr, j) * sign)))
    return out


def golden_residuals() -> dict:
    return {CHART.dep(n): parse(t, CHART) for n, t in GOLDEN_RESIDUALS.items()}


def strain_definitions() -> tuple:
    return tuple((n, parse(t, CHART)) for n, t in STRAINS)


def strain_quadratic_form(p: PlateParams) -> "list":
    """Numeric 5×5 matrix of V in (w_X - ψ, w_Y - φ, ψ_X, φ_Y, ψ_Y + φ_X)."""
    s = p.shear_stiffness
    D, nu = p.D, p.nu
    return [
        [s, 0, 0, 0, 0],
        [0, s, 0, 0, 0],
        [0, 0, D, D * nu, 0],
        [0, 0, D * nu, D, 0],
        [0, 0, 0, 0, D * (1 - nu) / 2],
    ]
