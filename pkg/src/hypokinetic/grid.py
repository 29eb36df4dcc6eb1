"""Phase-space tensor grids, quadrature weights and weighted inner products.

The continuum objects live on R x R (position x velocity, one space
dimension).  The grid truncates to [-L_x, L_x] x [-L_v, L_v] with either
uniform trapezoid nodes in v or Gauss-Hermite nodes (weights folded with
exp(+t^2) so that sums against w_v approximate plain dv integrals).  All
distribution-function samples are dense (N_x, N_v) float arrays; spatial
fields are (N_x,) arrays.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "PhaseGrid",
    "make_grid",
    "inner_mu",
    "norm_mu",
    "density",
    "flux",
    "second_moment",
    "inner_weighted",
    "save_field",
    "load_field",
    "field_to_csv",
]


@dataclass(frozen=True)
class PhaseGrid:
    """Tensor quadrature grid in (x, v).

    Attributes
    ----------
    x, v : node coordinates (uniform in x; uniform or Gauss-Hermite in v)
    w_x, w_v : positive quadrature weights such that sum(w_x * u(x))
        approximates the dx integral and likewise for v
    h_x : uniform x spacing
    v_quadrature : "gauss_hermite" or "uniform"
    """

    x: np.ndarray
    v: np.ndarray
    w_x: np.ndarray
    w_v: np.ndarray
    L_x: float
    L_v: float
    h_x: float
    v_quadrature: str
    # second-order differentiation matrix in v (dense, N_v x N_v), built once
    Dv: np.ndarray = field(repr=False, default=None)

    @property
    def n_x(self) -> int:
        return self.x.size

    @property
    def n_v(self) -> int:
        return self.v.size

    def shape(self):
        return (self.x.size, self.v.size)

    def dx(self, u: np.ndarray, axis: int = 0) -> np.ndarray:
        """Second-order x derivative (centered, one-sided at the ends)."""
        return np.gradient(u, self.h_x, axis=axis) if u.ndim > 1 else np.gradient(u, self.h_x)

    def d2x(self, u: np.ndarray) -> np.ndarray:
        """Second x derivative of a spatial field; boundary rows replicate
        the one-in interior stencil (all uses carry decaying weights)."""
        out = np.empty_like(u)
        out[1:-1] = (u[2:] - 2.0 * u[1:-1] + u[:-2]) / self.h_x**2
        out[0] = out[1]
        out[-1] = out[-2]
        return out


def _dv_matrix(v: np.ndarray) -> np.ndarray:
    """Dense second-order differentiation matrix on (possibly non-uniform)
    v nodes, obtained by differentiating the identity with np.gradient."""
    return np.gradient(np.eye(v.size), v, axis=0)


def make_grid(
    n_x: int = 257,
    n_v: int = 64,
    L_x: float = 8.0,
    L_v: float = 8.0,
    v_quadrature: str = "gauss_hermite",
) -> PhaseGrid:
    """Build the tensor grid.

    Gauss-Hermite nodes are scaled by sqrt(2) so that Gaussian velocity
    moments of exp(-v^2/2) are integrated exactly; the Hermite weights are
    folded with exp(t^2) to turn them into plain-dv quadrature weights.
    """
    x = np.linspace(-L_x, L_x, n_x)
    h_x = x[1] - x[0]
    w_x = np.full(n_x, h_x)
    w_x[0] = w_x[-1] = 0.5 * h_x

    if v_quadrature == "gauss_hermite":
        t, w = np.polynomial.hermite.hermgauss(n_v)
        v = np.sqrt(2.0) * t
        w_v = np.sqrt(2.0) * w * np.exp(t * t)
        L_v = float(v[-1])
    elif v_quadrature == "uniform":
        v = np.linspace(-L_v, L_v, n_v)
        h_v = v[1] - v[0]
        w_v = np.full(n_v, h_v)
        w_v[0] = w_v[-1] = 0.5 * h_v
    else:
        raise ValueError(f"unknown v_quadrature '{v_quadrature}'")

    return PhaseGrid(
        x=x, v=v, w_x=w_x, w_v=w_v, L_x=float(L_x), L_v=float(L_v),
        h_x=float(h_x), v_quadrature=v_quadrature, Dv=_dv_matrix(v),
    )


def _check_shape(f: np.ndarray, grid: PhaseGrid):
    if f.shape != grid.shape():
        raise ValueError(f"field shape {f.shape} does not match grid {grid.shape()}")


def inner_mu(f: np.ndarray, g: np.ndarray, grid: PhaseGrid, model) -> float:
    """Scalar product of the F^-1-weighted phase space: sum w_x w_v f g / F."""
    _check_shape(f, grid)
    _check_shape(g, grid)
    return float(grid.w_x @ ((f * g / model.F) @ grid.w_v))


def norm_mu(f: np.ndarray, grid: PhaseGrid, model) -> float:
    return np.sqrt(max(inner_mu(f, f, grid, model), 0.0))


def density(f: np.ndarray, grid: PhaseGrid) -> np.ndarray:
    """Velocity marginal: rho_i = sum_j w_v f_ij."""
    return f @ grid.w_v


def flux(f: np.ndarray, grid: PhaseGrid) -> np.ndarray:
    """First velocity moment: j_i = sum_j w_v v_j f_ij."""
    return f @ (grid.w_v * grid.v)


def second_moment(f: np.ndarray, grid: PhaseGrid) -> np.ndarray:
    """Second velocity moment: sigma_i = sum_j w_v v_j^2 f_ij."""
    return f @ (grid.w_v * grid.v**2)


def inner_weighted(u: np.ndarray, w: np.ndarray, weight: np.ndarray, grid: PhaseGrid) -> float:
    """Weighted spatial inner product sum w_x u w weight."""
    return float(np.sum(grid.w_x * u * w * weight))


_MAGIC = b"HKF1"


def save_field(path, f: np.ndarray, grid: PhaseGrid):
    """Dense binary dump: magic, N_x, N_v, L_x, L_v then row-major float64."""
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<iidd", grid.n_x, grid.n_v, grid.L_x, grid.L_v))
        np.ascontiguousarray(f, dtype=np.float64).tofile(fh)


def load_field(path):
    """Read a binary dump; returns (values, n_x, n_v, L_x, L_v)."""
    with open(path, "rb") as fh:
        if fh.read(4) != _MAGIC:
            raise ValueError(f"{path}: not a hypokinetic field dump")
        n_x, n_v, L_x, L_v = struct.unpack("<iidd", fh.read(24))
        values = np.fromfile(fh, dtype=np.float64, count=n_x * n_v).reshape(n_x, n_v)
    return values, n_x, n_v, L_x, L_v


def field_to_csv(path, f: np.ndarray, grid: PhaseGrid):
    """Plain CSV (x, v, f) for small grids."""
    _check_shape(f, grid)
    with open(path, "w") as fh:
        fh.write("x,v,f\n")
        for i, xi in enumerate(grid.x):
            for j, vj in enumerate(grid.v):
                fh.write(f"{xi!r},{vj!r},{f[i, j]!r}\n")
