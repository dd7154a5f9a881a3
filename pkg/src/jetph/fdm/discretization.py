"""Semi-discrete Mindlin plate shared by the geometric and the Stokes-Dirac form.

Both forms use one discrete energy

    H_h = ½ Σ W_n p²/m + ½ Γᵀ K_s Γ,   Γ = C q,

where C is the staggered strain map (shear strains and Γ_x on X-edges,
Γ_yz and Γ_y on Y-edges, Γ_xy on cells) and K_s holds the quadrature
weighted stiffness.  The geometric form evolves (q, p) with
W_n ṗ = -Cᵀ K_s C q + B u; the Dirac form evolves χ = (p, Γ) with the
matrix S = [[0, -Cᵀ W_Γ], [W_Γ C, 0]], which is skew by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from ..errors import ConfigError
from ..mindlin import PlateParams
from .grid import FACETS, Grid

VARIABLES = ("w", "psi", "phi")
STRAIN_NAMES = ("Gamma_xz", "Gamma_yz", "Gamma_x", "Gamma_y", "Gamma_xy")
BC_KINDS = ("clamped", "hinged", "free", "forced")
PINNED = {"clamped": VARIABLES, "hinged": ("w",), "free": (), "forced": ()}


def _smoothstep(tau):
    tau = np.clip(tau, 0.0, 1.0)
    return tau ** 3 * (10 - 15 * tau + 6 * tau ** 2)


@dataclass(frozen=True)
class Signal:
    """Boundary load history: ``sine`` A·sin(2πft + phase) or ``step`` A·[t ≥ start].

    A positive ``ramp`` multiplies the signal by a C² ramp from 0 to 1 over
    that duration.
    """

    kind: str = "sine"
    amplitude: float = 1.0
    frequency: float = 1.0
    phase: float = 0.0
    start: float = 0.0
    ramp: float = 0.0

    def __post_init__(self):
        if self.kind not in ("sine", "step"):
            raise ConfigError(f"unknown signal kind {self.kind!r}")
        if self.ramp < 0:
            raise ConfigError("signal ramp must be non-negative")

    @classmethod
    def from_dict(cls, d: dict) -> "Signal":
        try:
            return cls(**{k: (v if k == "kind" else float(v)) for k, v in d.items()})
        except TypeError as exc:
            raise ConfigError(f"bad signal spec {d!r}: {exc}") from None

    def __call__(self, t: float) -> float:
        if self.kind == "sine":
            v = self.amplitude * math.sin(2 * math.pi * self.frequency * t + self.phase)
        else:
            v = self.amplitude if t >= self.start else 0.0
        if self.ramp > 0:
            v *= float(_smoothstep((t - self.start) / self.ramp))
        return v


@dataclass(frozen=True)
class FacetBC:
    kind: str = "clamped"
    variable: str = "w"
    signal: Signal | None = None
    profile: str = "sine"

    def __post_init__(self):
        if self.kind not in BC_KINDS:
            raise ConfigError(f"unknown boundary condition {self.kind!r}; expected one of {BC_KINDS}")
        if self.kind == "forced":
            if self.variable not in VARIABLES:
                raise ConfigError(f"cannot force unknown variable {self.variable!r}")
            if self.signal is None:
                raise ConfigError("forced facet needs a signal")
            if self.profile not in ("sine", "uniform"):
                raise ConfigError(f"unknown load profile {self.profile!r}")

    @property
    def pinned(self) -> tuple:
        return PINNED[self.kind]

    @classmethod
    def from_spec(cls, spec) -> "FacetBC":
        if isinstance(spec, str):
            if spec == "forced":
                return cls("forced", signal=Signal())
            return cls(spec)
        if not isinstance(spec, dict) or "type" not in spec:
            raise ConfigError(f"boundary condition must be a name or an object with 'type', got {spec!r}")
        sig = spec.get("signal")
        return cls(
            spec["type"],
            spec.get("variable", "w"),
            Signal.from_dict(sig) if sig is not None else (Signal() if spec["type"] == "forced" else None),
            spec.get("profile", "sine"),
        )

    def to_dict(self) -> dict:
        d = {"type": self.kind}
        if self.kind == "forced":
            d.update(variable=self.variable, profile=self.profile, signal=vars(self.signal).copy())
        return d


def parse_bc(spec: dict | None) -> dict:
    """Facet name → FacetBC; facets not mentioned are clamped."""
    spec = spec or {}
    unknown = set(spec) - set(FACETS)
    if unknown:
        raise ConfigError(f"unknown facets {sorted(unknown)}; expected {FACETS}")
    return {f: FacetBC.from_spec(spec.get(f, "clamped")) for f in FACETS}


@dataclass
class SemiDiscretePlate:
    params: PlateParams
    grid: Grid
    bc: dict = field(default_factory=lambda: parse_bc(None))

    def __post_init__(self):
        g, p = self.grid, self.params
        if abs(g.lx - p.lx) > 1e-12 * p.lx or abs(g.ly - p.ly) > 1e-12 * p.ly:
            raise ConfigError("grid side lengths differ from the plate dimensions")
        if set(self.bc) != set(FACETS):
            self.bc = parse_bc(self.bc)
        ops = g.operators()
        N = g.n_nodes
        self.N = N
        Dx, Ax, Dy, Ay = ops["Dx"], ops["Ax"], ops["Dy"], ops["Ay"]
        self.C_full = sp.bmat(
            [
                [Dx, -Ax, None],
                [Dy, None, -Ay],
                [None, -Dx, None],
                [None, None, -Dy],
                [None, -ops["Dy_cell"], -ops["Dx_cell"]],
            ],
            format="csr",
        )
        wx, wy, wc = g.xedge_weights(), g.yedge_weights(), g.cell_weights()
        self.strain_sizes = (len(wx), len(wy), len(wx), len(wy), len(wc))
        self.strain_weights = np.concatenate([wx, wy, wx, wy, wc])
        s, D, nu = p.shear_stiffness, p.D, p.nu
        cross = D * nu * (ops["Px"].T @ sp.diags(wc) @ ops["Py"])
        self.K_s = sp.bmat(
            [
                [sp.diags(s * wx), None, None, None, None],
                [None, sp.diags(s * wy), None, None, None],
                [None, None, sp.diags(D * wx), cross, None],
                [None, None, cross.T, sp.diags(D * wy), None],
                [None, None, None, None, sp.diags(D * (1 - nu) / 2 * wc)],
            ],
            format="csr",
        )

        pinned = np.zeros(3 * N, dtype=bool)
        for facet, cond in self.bc.items():
            nodes = g.facet_nodes(facet)
            for v in cond.pinned:
                pinned[VARIABLES.index(v) * N + nodes] = True
        self.pinned = pinned
        self.active = np.flatnonzero(~pinned)
        self.node_w = np.tile(g.node_weights(), 3)[self.active]
        self.mass = np.repeat(np.asarray(p.masses), N)[self.active]
        self.C = self.C_full[:, self.active].tocsr()
        self.K_q = (self.C.T @ self.K_s @ self.C).tocsr()

        cols, self.signals, self.input_facets = [], [], []
        pos = np.full(3 * N, -1)
        pos[self.active] = np.arange(len(self.active))
        for facet in FACETS:
            cond = self.bc[facet]
            if cond.kind != "forced":
                continue
            nodes = g.facet_nodes(facet)
            s_coord = g.facet_coordinate(facet)
            prof = np.sin(np.pi * s_coord / g.facet_length(facet)) if cond.profile == "sine" else np.ones_like(s_coord)
            b = np.zeros(len(self.active))
            rows = pos[VARIABLES.index(cond.variable) * N + nodes]
            keep = rows >= 0  # pinned corners take precedence
            b[rows[keep]] = (g.facet_weights(facet) * prof)[keep]
            cols.append(b)
            self.signals.append(cond.signal)
            self.input_facets.append(facet)
        self.B = np.column_stack(cols) if cols else np.zeros((len(self.active), 0))

    # -- sizes and layout ---------------------------------------------------

    @property
    def n_active(self) -> int:
        return len(self.active)

    @property
    def n_strain(self) -> int:
        return self.C.shape[0]

    def inputs(self, t: float) -> np.ndarray:
        return np.array([s(t) for s in self.signals])

    def expand(self, v: np.ndarray) -> np.ndarray:
        """Active-DOF vector → (3, nx+1, ny+1) nodal fields with zeros at pinned DOFs."""
        full = np.zeros(3 * self.N)
        full[self.active] = v
        return full.reshape(3, *self.grid.node_shape)

    def restrict(self, fields: np.ndarray) -> np.ndarray:
        return np.asarray(fields, dtype=float).reshape(3 * self.N)[self.active]

    def split_strains(self, gamma: np.ndarray) -> dict:
        out, start = {}, 0
        for name, n in zip(STRAIN_NAMES, self.strain_sizes):
            out[name] = gamma[start:start + n]
            start += n
        return out

    # -- energy and power ---------------------------------------------------

    def velocity(self, p: np.ndarray) -> np.ndarray:
        return p / self.mass

    def kinetic_energy(self, p: np.ndarray) -> float:
        return 0.5 * float(np.dot(self.node_w * p, p / self.mass))

    def strain_energy(self, gamma: np.ndarray) -> float:
        return 0.5 * float(np.dot(gamma, self.K_s @ gamma))

    def energy(self, q: np.ndarray, p: np.ndarray) -> float:
        return self.kinetic_energy(p) + self.strain_energy(self.C @ q)

    def energy_chi(self, p: np.ndarray, gamma: np.ndarray) -> float:
        return self.kinetic_energy(p) + self.strain_energy(gamma)

    def boundary_power(self, p: np.ndarray, t: float) -> float:
        """Σ_facets ∫ rate · load; zero on clamped and free facets."""
        if not self.signals:
            return 0.0
        return float(np.dot(self.inputs(t), self.B.T @ self.velocity(p)))

    def facet_power(self, p: np.ndarray, t: float) -> dict:
        out = {f: 0.0 for f in FACETS}
        if self.signals:
            vals = self.inputs(t) * (self.B.T @ self.velocity(p))
            for f, v in zip(self.input_facets, vals):
                out[f] += float(v)
        return out

    # -- geometric form -----------------------------------------------------

    def momentum_rate(self, q: np.ndarray, t: float) -> np.ndarray:
        rhs = -(self.K_q @ q)
        if self.signals:
            rhs = rhs + self.B @ self.inputs(t)
        return rhs / self.node_w

    # -- Dirac form ---------------------------------------------------------

    def skew_matrix(self) -> sp.csr_matrix:
        """S = [[0, -Cᵀ W_Γ], [W_Γ C, 0]] on (momenta, strains)."""
        WC = (sp.diags(self.strain_weights) @ self.C).tocsr()
        return sp.bmat([[None, -WC.T], [WC, None]], format="csr")

    def inner_product_weights(self) -> np.ndarray:
        return np.concatenate([self.node_w, self.strain_weights])

    def efforts(self, p: np.ndarray, gamma: np.ndarray) -> tuple:
        """Weighted gradients (p/m, W_Γ⁻¹ K_s Γ): rates and stress resultants."""
        return self.velocity(p), (self.K_s @ gamma) / self.strain_weights

    def dirac_matrix(self) -> sp.csr_matrix:
        """A with χ̇ = A χ + g, i.e. W⁻¹ S applied to the efforts."""
        S = self.skew_matrix()
        winv = sp.diags(1.0 / self.inner_product_weights())
        E = sp.bmat(
            [[sp.diags(1.0 / self.mass), None], [None, sp.diags(1.0 / self.strain_weights) @ self.K_s]],
            format="csr",
        )
        return (winv @ S @ E).tocsr()

    def dirac_blocks(self) -> tuple:
        """Off-diagonal blocks of A: ṗ = A_pg Γ and Γ̇ = A_gp p."""
        A_pg = (sp.diags(-1.0 / self.node_w) @ self.C.T @ self.K_s).tocsr()
        A_gp = (self.C @ sp.diags(1.0 / self.mass)).tocsr()
        return A_pg, A_gp

    def dirac_forcing(self, t: float) -> np.ndarray:
        g = np.zeros(self.n_active + self.n_strain)
        if self.signals:
            g[: self.n_active] = (self.B @ self.inputs(t)) / self.node_w
        return g

    # -- stability ----------------------------------------------------------

    def wave_speed(self) -> float:
        p = self.params
        return max(math.sqrt(p.k * p.G / p.rho), math.sqrt(12 * p.D / (p.rho * p.h ** 3)))

    def cfl_time_step(self, cfl: float = 0.5) -> float:
        return cfl * min(self.grid.dx, self.grid.dy) / self.wave_speed()

    def max_frequency_bound(self) -> float:
        """Gershgorin bound on the largest angular frequency of the geometric form."""
        scale = 1.0 / (self.node_w * self.mass)
        M = sp.diags(scale) @ abs(self.K_q)
        return math.sqrt(float(np.max(np.asarray(M.sum(axis=1)).ravel())))

    def stable_time_step(self, cfl: float = 0.5) -> float:
        """min(CFL estimate, leapfrog bound 2/ω_max); the latter covers thickness-shear modes."""
        return min(self.cfl_time_step(cfl), 2.0 / self.max_frequency_bound())
