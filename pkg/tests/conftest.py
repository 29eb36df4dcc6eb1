import numpy as np
import pytest

from hypokinetic import build_equilibrium, fast_diffusion_potential, \
    gaussian_potential, make_grid


@pytest.fixture(scope="session")
def mx():
    """Default Maxwellian setup: (grid, model)."""
    grid = make_grid(n_x=257, n_v=64, L_x=8.0)
    model = build_equilibrium("maxwellian", gaussian_potential(), grid=grid)
    return grid, model


@pytest.fixture(scope="session")
def fd():
    """Default fast-diffusion setup (beta = 1.2, k = 3): (grid, model)."""
    grid = make_grid(n_x=257, n_v=257, L_x=12.0, L_v=40.0,
                     v_quadrature="uniform")
    model = build_equilibrium("fast_diffusion", fast_diffusion_potential(1.2),
                              k=3, grid=grid)
    return grid, model


@pytest.fixture(scope="session")
def mx_small():
    """Coarse Maxwellian setup for cheap dynamical tests."""
    grid = make_grid(n_x=65, n_v=32, L_x=8.0)
    model = build_equilibrium("maxwellian", gaussian_potential(), grid=grid)
    return grid, model
