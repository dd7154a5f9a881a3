"""Rectangular node grid with staggered edge and cell locations.

Nodes are numbered in C order, ``i * (ny + 1) + j`` with ``i`` along X.
X-edges sit between nodes (i, j) and (i + 1, j), Y-edges between (i, j) and
(i, j + 1), cells at the centers of the nx × ny squares.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from ..errors import ConfigError

FACETS = ("x0", "x1", "y0", "y1")


def difference_1d(n: int, h: float) -> sp.csr_matrix:
    """Forward difference from n + 1 nodes to n midpoints."""
    return sp.diags([-np.ones(n), np.ones(n)], [0, 1], shape=(n, n + 1), format="csr") / h


def average_1d(n: int) -> sp.csr_matrix:
    return sp.diags([0.5 * np.ones(n), 0.5 * np.ones(n)], [0, 1], shape=(n, n + 1), format="csr")


def trapezoid_weights(n: int, h: float) -> np.ndarray:
    w = np.full(n + 1, h)
    w[0] = w[-1] = h / 2
    return w


@dataclass(frozen=True)
class Grid:
    nx: int
    ny: int
    lx: float = 1.0
    ly: float = 1.0

    def __post_init__(self):
        if int(self.nx) != self.nx or int(self.ny) != self.ny or self.nx < 4 or self.ny < 4:
            raise ConfigError(f"grid needs at least 4 cells per direction, got {self.nx}x{self.ny}")
        if not (self.lx > 0 and self.ly > 0):
            raise ConfigError("side lengths must be positive")

    @property
    def dx(self) -> float:
        return self.lx / self.nx

    @property
    def dy(self) -> float:
        return self.ly / self.ny

    @property
    def node_shape(self) -> tuple:
        return (self.nx + 1, self.ny + 1)

    @property
    def n_nodes(self) -> int:
        return (self.nx + 1) * (self.ny + 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(0.0, self.lx, self.nx + 1)

    @property
    def y(self) -> np.ndarray:
        return np.linspace(0.0, self.ly, self.ny + 1)

    def mesh(self) -> tuple:
        return np.meshgrid(self.x, self.y, indexing="ij")

    def node_weights(self) -> np.ndarray:
        """Trapezoid weights; corner nodes carry a quarter cell."""
        return np.outer(trapezoid_weights(self.nx, self.dx), trapezoid_weights(self.ny, self.dy)).ravel()

    def xedge_weights(self) -> np.ndarray:
        return np.outer(np.full(self.nx, self.dx), trapezoid_weights(self.ny, self.dy)).ravel()

    def yedge_weights(self) -> np.ndarray:
        return np.outer(trapezoid_weights(self.nx, self.dx), np.full(self.ny, self.dy)).ravel()

    def cell_weights(self) -> np.ndarray:
        return np.full(self.nx * self.ny, self.dx * self.dy)

    def facet_nodes(self, facet: str) -> np.ndarray:
        idx = np.arange(self.n_nodes).reshape(self.node_shape)
        try:
            return {"x0": idx[0, :], "x1": idx[-1, :], "y0": idx[:, 0], "y1": idx[:, -1]}[facet]
        except KeyError:
            raise ConfigError(f"unknown facet {facet!r}; expected one of {FACETS}") from None

    def facet_weights(self, facet: str) -> np.ndarray:
        """Trapezoid weights along a facet."""
        if facet in ("x0", "x1"):
            return trapezoid_weights(self.ny, self.dy)
        if facet in ("y0", "y1"):
            return trapezoid_weights(self.nx, self.dx)
        raise ConfigError(f"unknown facet {facet!r}")

    def facet_coordinate(self, facet: str) -> np.ndarray:
        """Arc-length position of the facet nodes."""
        return self.y if facet in ("x0", "x1") else self.x

    def facet_length(self, facet: str) -> float:
        return self.ly if facet in ("x0", "x1") else self.lx

    def operators(self) -> dict:
        """Sparse node-to-edge and node-to-cell differences and averages."""
        nx, ny = self.nx, self.ny
        dxo, ax = difference_1d(nx, self.dx), average_1d(nx)
        dyo, ay = difference_1d(ny, self.dy), average_1d(ny)
        ix, iy = sp.identity(nx + 1, format="csr"), sp.identity(ny + 1, format="csr")
        return {
            "Dx": sp.kron(dxo, iy, format="csr"),
            "Ax": sp.kron(ax, iy, format="csr"),
            "Dy": sp.kron(ix, dyo, format="csr"),
            "Ay": sp.kron(ix, ay, format="csr"),
            "Dy_cell": sp.kron(ax, dyo, format="csr"),
            "Dx_cell": sp.kron(dxo, ay, format="csr"),
            # edge-to-cell averages used by the Poisson coupling
            "Px": sp.kron(sp.identity(nx, format="csr"), ay, format="csr"),
            "Py": sp.kron(ax, sp.identity(ny, format="csr"), format="csr"),
        }
