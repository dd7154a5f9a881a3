"""Port-Hamiltonian derivations from jet-bundle Lagrangians, with plate simulations."""

__version__ = "0.1.0"
