"""Störmer-Verlet for the geometric form and implicit midpoint for the Dirac form."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from ..errors import NumericalError
from .discretization import SemiDiscretePlate


@dataclass(frozen=True)
class GeometricState:
    q: np.ndarray
    p: np.ndarray
    t: float = 0.0


@dataclass(frozen=True)
class DiracState:
    p: np.ndarray
    gamma: np.ndarray
    t: float = 0.0
    q: np.ndarray | None = None  # configuration recovered by integrating the rate effort

    @property
    def chi(self) -> np.ndarray:
        return np.concatenate([self.p, self.gamma])


def total_energy(system: SemiDiscretePlate, state) -> float:
    if isinstance(state, GeometricState):
        return system.energy(state.q, state.p)
    return system.energy_chi(state.p, state.gamma)


def dirac_from_geometric(system: SemiDiscretePlate, state: GeometricState) -> DiracState:
    """Map (q, p) to (p, Γ = C q); compatibility holds exactly."""
    return DiracState(state.p.copy(), system.C @ state.q, state.t, state.q.copy())


def step_leapfrog(system: SemiDiscretePlate, state: GeometricState, dt: float) -> GeometricState:
    """Kick-drift-kick; the load is sampled at both ends of the step."""
    t0, t1 = state.t, state.t + dt
    p_half = state.p + 0.5 * dt * system.momentum_rate(state.q, t0)
    q1 = state.q + dt * system.velocity(p_half)
    p1 = p_half + 0.5 * dt * system.momentum_rate(q1, t1)
    return GeometricState(q1, p1, t1)


class MidpointStepper:
    """Implicit midpoint for χ̇ = Aχ + g(t) with one sparse LU per step size."""

    def __init__(self, system: SemiDiscretePlate, dt: float):
        self.system = system
        self.dt = dt
        # (I - h A) χ⁺ = r with A = [[0, A_pg], [A_gp, 0]] is reduced to the momenta
        self.A_pg, self.A_gp = system.dirac_blocks()
        h = 0.5 * dt
        n = system.n_active
        schur = sp.identity(n, format="csc") - h * h * (self.A_pg @ self.A_gp)
        try:
            self.lu = splu(schur.tocsc(), permc_spec="MMD_AT_PLUS_A")
        except RuntimeError as exc:
            raise NumericalError(f"midpoint system could not be factored (n={n}, dt={dt}): {exc}") from exc

    def step(self, state: DiracState) -> DiracState:
        s, dt = self.system, self.dt
        h = 0.5 * dt
        r1 = state.p + h * (self.A_pg @ state.gamma)
        r2 = state.gamma + h * (self.A_gp @ state.p)
        if s.signals:
            r1 = r1 + dt * s.dirac_forcing(state.t + h)[: s.n_active]
        p1 = self.lu.solve(r1 + h * (self.A_pg @ r2))
        g1 = r2 + h * (self.A_gp @ p1)
        new = np.concatenate([p1, g1])
        if not np.all(np.isfinite(new)):
            raise NumericalError(f"midpoint solve produced non-finite values at t={state.t + dt:g}")
        q1 = None
        if state.q is not None:
            q1 = state.q + dt * s.velocity(0.5 * (state.p + p1))
        return DiracState(p1, g1, state.t + dt, q1)


def step_midpoint(system: SemiDiscretePlate, state: DiracState, dt: float, stepper: MidpointStepper | None = None) -> DiracState:
    if stepper is None or stepper.dt != dt or stepper.system is not system:
        stepper = MidpointStepper(system, dt)
    return stepper.step(state)


def compatibility_residual(system: SemiDiscretePlate, state: DiracState) -> np.ndarray:
    """Γ - C q for a Dirac state carrying its reconstructed configuration."""
    if state.q is None:
        raise ValueError("state carries no configuration")
    return state.gamma - system.C @ state.q


def zero_geometric(system: SemiDiscretePlate) -> GeometricState:
    n = system.n_active
    return GeometricState(np.zeros(n), np.zeros(n), 0.0)


def with_time(state, t: float):
    return replace(state, t=t)
