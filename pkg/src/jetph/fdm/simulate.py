"""Simulation configs and the time loop producing energy and power records.

A simulation config is JSON::

    {
      "model": "mindlin",
      "plate": {"rho": 1, "h": 0.1, ...} or "plate": "steel" | "test_plate",
      "grid": {"nx": 32, "ny": 32},
      "dt": 0.005,                 # optional; default from the stability bounds
      "cfl": 0.5,
      "steps": 200,                # or "t_end"
      "formulation": "geometric" | "dirac" | "both",
      "bc": {"x0": "clamped", "x1": {"type": "forced", "signal": {...}}},
      "initial": {"kind": "gaussian", "amplitude": 0.001, "width": 0.08},
      "snapshot_every": 0,
      "tolerance": {"balance_residual": 1e-6},
      "force": false
    }
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from ..errors import ConfigError, StabilityError
from ..mindlin import PlateParams
from .discretization import FacetBC, SemiDiscretePlate, parse_bc
from .grid import Grid
from .integrators import (
    DiracState,
    GeometricState,
    MidpointStepper,
    dirac_from_geometric,
    step_leapfrog,
)

FORMULATIONS = ("geometric", "dirac", "both")


@dataclass(frozen=True)
class SimConfig:
    plate: PlateParams
    nx: int = 32
    ny: int = 32
    steps: int = 100
    dt: float | None = None
    cfl: float = 0.5
    formulation: str = "geometric"
    bc: dict = field(default_factory=lambda: parse_bc(None))
    initial: dict = field(default_factory=lambda: {"kind": "gaussian"})
    snapshot_every: int = 0
    tolerance: dict = field(default_factory=dict)
    force: bool = False
    t_end: float | None = None

    def __post_init__(self):
        if self.formulation not in FORMULATIONS:
            raise ConfigError(f"formulation must be one of {FORMULATIONS}")
        if self.steps < 0:
            raise ConfigError("steps must be non-negative")
        if self.dt is not None and not (self.dt > 0 and math.isfinite(self.dt)):
            raise ConfigError("dt must be positive")
        if not self.cfl > 0:
            raise ConfigError("cfl must be positive")
        if self.snapshot_every < 0:
            raise ConfigError("snapshot_every must be non-negative")

    @property
    def grid(self) -> Grid:
        return Grid(self.nx, self.ny, self.plate.lx, self.plate.ly)

    def to_dict(self) -> dict:
        return {
            "model": "mindlin",
            "plate": self.plate.to_dict(),
            "grid": {"nx": self.nx, "ny": self.ny},
            "dt": self.dt,
            "cfl": self.cfl,
            "steps": self.steps,
            "formulation": self.formulation,
            "bc": {k: v.to_dict() for k, v in self.bc.items()},
            "initial": dict(self.initial),
            "snapshot_every": self.snapshot_every,
            "tolerance": dict(self.tolerance),
            "force": self.force,
        }


def _plate(spec) -> PlateParams:
    if spec is None or spec == "steel":
        return PlateParams.steel()
    if spec == "test_plate":
        return PlateParams.test_plate()
    if isinstance(spec, dict):
        return PlateParams.from_dict(spec)
    raise ConfigError(f"unknown plate spec {spec!r}")


def config_from_dict(d: dict) -> SimConfig:
    if not isinstance(d, dict):
        raise ConfigError("simulation config must be a JSON object")
    known = {"model", "plate", "grid", "dt", "cfl", "steps", "t_end", "formulation", "bc", "initial",
             "snapshot_every", "tolerance", "force", "description"}
    extra = set(d) - known
    if extra:
        raise ConfigError(f"unknown simulation config keys {sorted(extra)}")
    if d.get("model", "mindlin") != "mindlin":
        raise ConfigError("only the mindlin model can be simulated")
    try:
        grid = d.get("grid", {})
        return SimConfig(
            plate=_plate(d.get("plate")),
            nx=int(grid.get("nx", 32)),
            ny=int(grid.get("ny", grid.get("nx", 32))),
            steps=int(100 if d.get("steps") is None else d["steps"]),
            dt=None if d.get("dt") is None else float(d["dt"]),
            cfl=float(d.get("cfl", 0.5)),
            formulation=str(d.get("formulation", "geometric")),
            bc=parse_bc(d.get("bc")),
            initial=dict(d.get("initial", {"kind": "gaussian"})),
            snapshot_every=int(d.get("snapshot_every", 0)),
            tolerance=dict(d.get("tolerance", {})),
            force=bool(d.get("force", False)),
            t_end=None if d.get("t_end") is None else float(d["t_end"]),
        )
    except (TypeError, ValueError, AttributeError) as exc:
        raise ConfigError(f"invalid simulation config: {exc}") from exc


def load_config(path) -> SimConfig:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"simulation config not found: {path}")
    try:
        return config_from_dict(json.loads(p.read_text()))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed simulation config {path}: {exc}") from exc


@dataclass
class TimeSeries:
    t: np.ndarray
    H: np.ndarray
    P_boundary: np.ndarray
    balance_residual: np.ndarray
    discrepancy: np.ndarray | None = None
    compatibility: np.ndarray | None = None

    def columns(self) -> dict:
        cols = {"t": self.t, "H": self.H, "P_boundary": self.P_boundary, "balance_residual": self.balance_residual}
        if self.discrepancy is not None:
            cols["discrepancy"] = self.discrepancy
        return cols

    def max_abs_residual(self) -> float:
        r = np.abs(self.balance_residual)
        return float(np.nanmax(r)) if np.any(np.isfinite(r)) else 0.0


def balance_residual(H: np.ndarray, P: np.ndarray, dt: float) -> np.ndarray:
    """Centered dH/dt of the record minus the boundary power; NaN for a single record."""
    H = np.asarray(H, dtype=float)
    if len(H) < 2:
        return np.full(len(H), np.nan)
    dH = np.gradient(H, dt, edge_order=2 if len(H) >= 3 else 1)
    return dH - P


@dataclass
class SimResult:
    config: SimConfig
    dt: float
    system: SemiDiscretePlate
    series: dict
    snapshots: dict
    discrepancy: np.ndarray | None = None


def initial_state(system: SemiDiscretePlate, spec: dict) -> GeometricState:
    g, kind = system.grid, spec.get("kind", "gaussian")
    fields = np.zeros((6, *g.node_shape))
    if kind == "gaussian":
        X, Y = g.mesh()
        cx, cy = spec.get("center", [g.lx / 2, g.ly / 2])
        width = float(spec.get("width", 0.08 * min(g.lx, g.ly)))
        amp = float(spec.get("amplitude", 1e-3))
        bump = amp * np.exp(-((X - cx) ** 2 + (Y - cy) ** 2) / (2 * width ** 2))
        names = ("w", "psi", "phi", "p_w", "p_psi", "p_phi")
        target = spec.get("field", "w")
        if target not in names:
            raise ConfigError(f"unknown initial field {target!r}")
        fields[names.index(target)] = bump
        if target == "w" and spec.get("rotations") == "bending":
            # ψ = w_X, φ = w_Y: no initial transverse shear strain
            fields[1] = -bump * (X - cx) / width ** 2
            fields[2] = -bump * (Y - cy) / width ** 2
    elif kind == "polynomial_bump":
        X, Y = g.mesh()
        cx, cy = spec.get("center", [g.lx / 2, g.ly / 2])
        radius = float(spec.get("radius", 0.4 * min(g.lx, g.ly)))
        power = int(spec.get("power", 6))
        amp = float(spec.get("amplitude", 1e-3))
        s = np.clip(1 - ((X - cx) ** 2 + (Y - cy) ** 2) / radius ** 2, 0.0, None)
        fields[0] = amp * s ** power
    elif kind != "zero":
        raise ConfigError(f"unknown initial condition {kind!r}")
    return GeometricState(system.restrict(fields[:3]), system.restrict(fields[3:]), 0.0)


def choose_time_step(system: SemiDiscretePlate, cfg: SimConfig) -> float:
    """Configured dt, or a step meeting both the CFL estimate and the leapfrog bound."""
    limit_cfl = system.cfl_time_step(cfg.cfl)
    limit_lf = 2.0 / system.max_frequency_bound()
    dt = cfg.dt if cfg.dt is not None else min(limit_cfl, 0.9 * limit_lf)
    if cfg.formulation in ("geometric", "both") and (dt > limit_cfl or dt > limit_lf):
        msg = (f"dt={dt:.4g} exceeds the stability bound (CFL {limit_cfl:.4g}, "
               f"leapfrog 2/omega_max {limit_lf:.4g})")
        if not cfg.force:
            raise StabilityError(msg + "; set force (--force) to run anyway")
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
    return dt


def _snapshot(system, q, p) -> np.ndarray:
    return np.concatenate([system.expand(q), system.expand(p)])


def run(cfg: SimConfig, system: SemiDiscretePlate | None = None) -> SimResult:
    system = system or SemiDiscretePlate(cfg.plate, cfg.grid, cfg.bc)
    dt = choose_time_step(system, cfg)
    steps = cfg.steps if cfg.t_end is None else int(round(cfg.t_end / dt))
    forms = ("geometric", "dirac") if cfg.formulation == "both" else (cfg.formulation,)
    x0 = initial_state(system, cfg.initial)
    series, snaps, w_hist = {}, {}, {}
    for form in forms:
        H, P, C, W, snap_t, snap_d = [], [], [], [], [], []
        if form == "geometric":
            state = x0

            def advance(s):
                return step_leapfrog(system, s, dt)
        else:
            state = dirac_from_geometric(system, x0)
            stepper = MidpointStepper(system, dt)
            advance = stepper.step
        for n in range(steps + 1):
            if n > 0:
                state = advance(state)
            q = state.q
            if form == "geometric":
                H.append(system.energy(state.q, state.p))
            else:
                H.append(system.energy_chi(state.p, state.gamma))
                C.append(float(np.max(np.abs(state.gamma - system.C @ q))) if len(state.gamma) else 0.0)
            P.append(system.boundary_power(state.p, n * dt))
            W.append(system.expand(q)[0])
            if cfg.snapshot_every and n % cfg.snapshot_every == 0:
                snap_t.append(n * dt)
                snap_d.append(_snapshot(system, q, state.p))
        t = dt * np.arange(steps + 1)
        H, P = np.array(H), np.array(P)
        series[form] = TimeSeries(t, H, P, balance_residual(H, P, dt), None, np.array(C) if C else None)
        w_hist[form] = W
        if cfg.snapshot_every:
            snaps[form] = (np.array(snap_t), np.array(snap_d))
    disc = None
    if len(forms) == 2:
        disc = np.array([float(np.max(np.abs(a - b))) for a, b in zip(w_hist["geometric"], w_hist["dirac"])])
        for s in series.values():
            s.discrepancy = disc
    return SimResult(cfg, dt, system, series, snaps, disc)


def with_overrides(cfg: SimConfig, grid=None, dt=None, steps=None, bc=None, formulation=None, force=None) -> SimConfig:
    """Apply command-line overrides; ``bc`` maps facet names to condition names."""
    changes = {}
    if grid is not None:
        changes["nx"], changes["ny"] = grid
    if dt is not None:
        changes["dt"] = dt
    if steps is not None:
        changes["steps"] = steps
        changes["t_end"] = None
    if formulation is not None:
        changes["formulation"] = formulation
    if force:
        changes["force"] = True
    if bc:
        merged = dict(cfg.bc)
        for facet, kind in bc.items():
            if facet not in merged:
                raise ConfigError(f"unknown facet {facet!r}")
            merged[facet] = FacetBC.from_spec(kind)
        changes["bc"] = merged
    return replace(cfg, **changes)
