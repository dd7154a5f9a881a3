"""Grid-based oracles for the variational calculus.

``functional_gradient_check`` compares δ_α F with the gradient of a
discretized integral on a periodic grid; ``decomposition_error`` measures
how well the integral identity ∫ j¹(v)F = ∫ v⌟δF + ∮ v⌟δ^∂F holds under
trapezoid quadrature.  Fields are finite sums of sinusoids, so their jets
are known in closed form.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .symbolic import DepCoord, JetCoordinate, Param, ZERO, evaluate, params
from .textio import Chart
from .variational import Density, boundary_form, first_variation, rectangle_facets, variational_derivative


@dataclass(frozen=True)
class TrigField:
    """Σ a·sin(kx X + ky Y + c) with analytic derivatives."""

    terms: tuple  # ((a, kx, ky, c), ...)

    def derivative(self, X, Y, mx: int = 0, my: int = 0):
        out = np.zeros(np.broadcast(X, Y).shape)
        n = mx + my
        for a, kx, ky, c in self.terms:
            arg = kx * X + ky * Y + c
            # d^n/ds^n sin(s) = sin(s + nπ/2)
            out = out + a * kx ** mx * ky ** my * np.sin(arg + n * np.pi / 2)
        return out

    @classmethod
    def random(cls, rng: np.random.Generator, n_terms: int = 2, integer: bool = False, kmax: float = 2.0):
        terms = []
        for _ in range(n_terms):
            a = rng.uniform(-1, 1)
            if integer:
                kx, ky = (int(v) for v in rng.integers(-2, 3, size=2))
            else:
                kx, ky = rng.uniform(-kmax, kmax, size=2)
            terms.append((a, kx, ky, rng.uniform(0, 2 * np.pi)))
        return cls(tuple(terms))


def jet_values(chart: Chart, fields: dict, X, Y, order: int = 2) -> dict:
    """Closed-form values of every jet up to ``order``; time derivatives vanish."""
    sx, sy = chart.spatial[0], chart.spatial[1] if len(chart.spatial) > 1 else None
    env = {}
    for dep in chart.deps:
        f = fields[dep.name]
        for mx in range(order + 1):
            for my in range(order + 1 - mx):
                if sy is None and my:
                    continue
                mi = tuple(x for x in ((sx, mx), (sy, my)) if x[0] is not None and x[1])
                env[JetCoordinate(dep, mi)] = f.derivative(X, Y, mx, my)
        if chart.time is not None:
            zero = np.zeros(np.broadcast(X, Y).shape)
            t = chart.time
            env[JetCoordinate(dep, ((t, 1),))] = zero
            env[JetCoordinate(dep, ((t, 2),))] = zero
            for c in chart.spatial:
                env[JetCoordinate(dep, ((t, 1), (c, 1)))] = zero
    return env


def _evaluate(expr, env: dict, values: dict, shape) -> np.ndarray:
    full = dict(env)
    full.update(values)
    out = evaluate(expr, full, exact=False)
    return np.broadcast_to(np.asarray(out, dtype=float), shape)


def functional_gradient_check(density: Density, fields: dict, values: dict | None = None, n: int = 16,
                              eps: float = 1e-3) -> tuple:
    """Discrete gradient of Σ F h² versus δ_α F on a periodic n×n grid over [0, 2π)².

    First-order jets in the discrete functional use central differences.
    Returns ``(max_abs_error, max_abs_exact, h)`` over all variables and nodes.
    """
    chart = density.chart
    values = {Param(k) if isinstance(k, str) else k: v for k, v in (values or {}).items()}
    h = 2 * np.pi / n
    x = h * np.arange(n)
    X, Y = np.meshgrid(x, x, indexing="ij")
    sx, sy = chart.spatial
    samples = {d: fields[d.name].derivative(X, Y) for d in chart.deps}
    zero = np.zeros((n, n))

    def functional(s):
        env = {}
        for d in chart.deps:
            u = s[d]
            env[JetCoordinate(d)] = u
            env[JetCoordinate(d, ((sx, 1),))] = (np.roll(u, -1, 0) - np.roll(u, 1, 0)) / (2 * h)
            env[JetCoordinate(d, ((sy, 1),))] = (np.roll(u, -1, 1) - np.roll(u, 1, 1)) / (2 * h)
            if chart.time is not None:
                env[JetCoordinate(d, ((chart.time, 1),))] = zero
        return float(np.sum(_evaluate(density.expr, env, values, (n, n)))) * h * h

    exact_env = jet_values(chart, fields, X, Y)
    err, scale = 0.0, 0.0
    for d in chart.deps:
        exact = _evaluate(variational_derivative(density, d), exact_env, values, (n, n))
        grad = np.empty((n, n))
        for i in range(n):
            for j in range(n):
                plus = {k: v.copy() for k, v in samples.items()}
                minus = {k: v.copy() for k, v in samples.items()}
                plus[d][i, j] += eps
                minus[d][i, j] -= eps
                grad[i, j] = (functional(plus) - functional(minus)) / (2 * eps * h * h)
        err = max(err, float(np.max(np.abs(grad - exact))))
        scale = max(scale, float(np.max(np.abs(exact))))
    return err, scale, h


def trapezoid_2d(f: np.ndarray, hx: float, hy: float) -> float:
    wx = np.full(f.shape[0], hx)
    wx[[0, -1]] /= 2
    wy = np.full(f.shape[1], hy)
    wy[[0, -1]] /= 2
    return float(wx @ f @ wy)


def trapezoid_1d(f: np.ndarray, h: float) -> float:
    return float(h * (np.sum(f) - 0.5 * (f[0] + f[-1])))


def trapezoid_2d_bound(f: np.ndarray, hx: float, hy: float) -> float:
    """Error bound (A/12)(hx² max|f_xx| + hy² max|f_yy|), curvatures from second differences."""
    area = hx * (f.shape[0] - 1) * hy * (f.shape[1] - 1)
    fxx = np.max(np.abs(np.diff(f, 2, axis=0))) / hx ** 2
    fyy = np.max(np.abs(np.diff(f, 2, axis=1))) / hy ** 2
    return float(area / 12 * (hx ** 2 * fxx + hy ** 2 * fyy))


def trapezoid_1d_bound(f: np.ndarray, h: float) -> float:
    return float(h * (len(f) - 1) / 12 * np.max(np.abs(np.diff(f, 2))))


def decomposition_terms(density: Density, fields: dict, variation: dict, n: int, lx: float = 1.0,
                        ly: float = 1.0) -> tuple:
    """(total, domain, boundary, tolerance) for the first-variation identity on [0, lx]×[0, ly].

    ``tolerance`` sums the trapezoid error bounds of every integral involved.
    """
    chart = density.chart
    sx, sy = chart.spatial
    x, y = np.linspace(0, lx, n + 1), np.linspace(0, ly, n + 1)
    X, Y = np.meshgrid(x, y, indexing="ij")
    vdeps = {d: DepCoord(f"v_{d.name}", 100 + i) for i, d in enumerate(chart.deps)}
    vchart = Chart(chart.indep, chart.deps + tuple(vdeps.values()))
    vfields = dict(fields)
    vfields.update({vdeps[d].name: variation[d.name] for d in chart.deps})
    env = jet_values(vchart, vfields, X, Y)
    shape = X.shape
    var = {d: JetCoordinate(vdeps[d]) for d in chart.deps}

    total_expr = first_variation(density, var)
    hx, hy = x[1] - x[0], y[1] - y[0]
    f_total = _evaluate(total_expr, env, {}, shape)
    total = trapezoid_2d(f_total, hx, hy)
    dom = ZERO
    for d in chart.deps:
        dom = dom + var[d] * variational_derivative(density, d)
    f_dom = _evaluate(dom, env, {}, shape)
    domain = trapezoid_2d(f_dom, hx, hy)
    tol = trapezoid_2d_bound(f_total, hx, hy) + trapezoid_2d_bound(f_dom, hx, hy)
    bf = boundary_form(density)
    boundary = 0.0
    for facet in rectangle_facets(chart):
        integrand = _evaluate(bf.integrand(facet, var), env, {}, shape)
        if facet.coord == sx:
            line, h = integrand[0 if facet.side < 0 else -1, :], y[1] - y[0]
        else:
            line, h = integrand[:, 0 if facet.side < 0 else -1], x[1] - x[0]
        boundary += trapezoid_1d(line, h)
        tol += trapezoid_1d_bound(line, h)
    return total, domain, boundary, tol


def decomposition_error(density, fields, variation, n: int) -> tuple:
    """(|domain + boundary - total|, quadrature tolerance)."""
    total, domain, boundary, tol = decomposition_terms(density, fields, variation, n)
    return abs(domain + boundary - total), tol


def random_quadratic_density(rng: random.Random, chart: Chart, n_terms: int = 6) -> Density:
    """Random quadratic form in the order ≤ 1 spatial jets with rational coefficients."""
    basis = []
    for d in chart.deps:
        basis.append(JetCoordinate(d))
        for c in chart.spatial:
            basis.append(JetCoordinate(d, ((c, 1),)))
    expr = ZERO
    for _ in range(n_terms):
        a, b = rng.choice(basis), rng.choice(basis)
        expr = expr + a * b * Fraction(rng.randint(-9, 9) or 1, rng.randint(1, 5))
    # a linear term exercises the zero-order part of δ_α
    expr = expr + rng.choice(basis) * Fraction(rng.randint(1, 5))
    return Density(chart, expr)


def numeric_parameters(expr, values: dict) -> dict:
    """Check that every parameter of ``expr`` has a value; keys become Params."""
    out = {Param(k) if isinstance(k, str) else k: float(v) for k, v in values.items()}
    missing = [p.name for p in params(expr) if p not in out]
    if missing:
        raise KeyError(f"no value for parameters {missing}")
    return out


__all__ = [
    "TrigField", "decomposition_error", "decomposition_terms", "functional_gradient_check", "jet_values",
    "numeric_parameters", "random_quadratic_density", "trapezoid_1d", "trapezoid_1d_bound", "trapezoid_2d",
    "trapezoid_2d_bound",
]
