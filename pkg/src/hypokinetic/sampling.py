"""Seeded smooth random fields for property checks and constant estimation.

Fields are built as the equilibrium times bounded smooth envelopes so that
every weighted norm in play stays finite for both the Gaussian and the
algebraic-tail equilibrium.
"""

from __future__ import annotations

import numpy as np

from .grid import PhaseGrid
from .model import EquilibriumModel

__all__ = ["random_spatial", "random_phase_field", "random_recentered_field"]


def _bounded_profiles(z: np.ndarray, rng: np.random.Generator, n: int) -> np.ndarray:
    """Stack of n bounded smooth functions with O(1) derivatives."""
    out = np.empty((n, z.size))
    for m in range(n):
        kind = rng.integers(0, 4)
        if kind == 0:
            out[m] = np.sin(rng.uniform(0.2, 1.0) * z + rng.uniform(0, 2 * np.pi))
        elif kind == 1:
            c = rng.uniform(-0.4, 0.4) * (np.max(np.abs(z)) + 1.0)
            s = rng.uniform(0.8, 2.5)
            out[m] = np.exp(-((z - c) / s) ** 2)
        elif kind == 2:
            out[m] = np.tanh(rng.uniform(0.3, 1.0) * z)
        else:
            out[m] = z / (1.0 + z * z)
    return out


def random_spatial(grid: PhaseGrid, rng: np.random.Generator, n_modes: int = 4) -> np.ndarray:
    """Smooth bounded random function of x."""
    coeff = rng.standard_normal(n_modes)
    return coeff @ _bounded_profiles(grid.x, rng, n_modes)


def random_phase_field(model: EquilibriumModel, grid: PhaseGrid,
                       rng: np.random.Generator, n_modes: int = 4) -> np.ndarray:
    """F times a separable smooth bounded envelope in (x, v)."""
    X = _bounded_profiles(grid.x, rng, n_modes)
    Y = _bounded_profiles(grid.v, rng, n_modes)
    coeff = rng.standard_normal(n_modes)
    phi = np.einsum("m,mi,mj->ij", coeff, X, Y)
    return model.F * phi


def random_recentered_field(model: EquilibriumModel, grid: PhaseGrid,
                            rng: np.random.Generator) -> np.ndarray:
    """Random field with the conserved component removed (zero total mass)."""
    f = random_phase_field(model, grid, rng)
    mass = float(grid.w_x @ (f @ grid.w_v))
    return f - mass * model.F
