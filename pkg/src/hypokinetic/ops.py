"""Operator algebra on the discrete phase space.

Everything is realized through velocity moments and a shared 1-D weighted
elliptic kernel

    weight0 * u - d/dx( weight1 * du/dx ) = rhs,

discretized in conservative (flux) form so the resulting tridiagonal system
is symmetric positive definite.  The auxiliary operator maps a phase-space
field to u * F where u solves the kernel with (weight0, weight1) =
(rho_F, m_F/d) and rhs = -d/dx of the velocity flux; its discrete adjoint
is assembled by transposing that exact composition, so adjoint identities
hold to solver precision rather than discretization order.

The transport operator is applied in the symmetrized representation
xi = f / sqrt(F): there the weighted inner product becomes the plain
quadrature one, the x-part of v d/dx telescopes under summation by parts
and the v-part is skew-symmetrized explicitly, which makes the discrete
operator anti-symmetric up to boundary-decay dust.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve_banded, cholesky_banded

from .errors import SingularSystem
from .grid import PhaseGrid, density, flux, second_moment
from .model import EquilibriumModel

__all__ = [
    "EllipticOperator",
    "solve_elliptic",
    "operator_kit",
    "apply_T",
    "apply_Pi",
    "apply_L",
    "apply_b",
    "apply_a",
    "apply_ahat",
    "apply_A",
    "apply_TA",
    "apply_A_star",
    "dual_norm_AT_perp",
    "dual_coefficient",
    "recenter",
]


def _dx_transpose(y: np.ndarray, h: float) -> np.ndarray:
    """Transpose of the np.gradient first-derivative stencil (uniform grid,
    first-order one-sided rows at the two ends)."""
    out = np.zeros_like(y)
    out[:-2] -= y[1:-1] / (2.0 * h)
    out[2:] += y[1:-1] / (2.0 * h)
    out[0] -= y[0] / h
    out[1] += y[0] / h
    out[-2] -= y[-1] / h
    out[-1] += y[-1] / h
    return out


class EllipticOperator:
    """Conservative discretization of u -> weight0 u - (weight1 u')'.

    The weak (Galerkin) matrix is S = diag(w_x * weight0) + K with K the
    stiffness of weight1 evaluated at half nodes (arithmetic average);
    natural boundary conditions.  S is SPD and factorized once.
    """

    def __init__(self, weight0: np.ndarray, weight1: np.ndarray, grid: PhaseGrid):
        if np.any(weight0 <= 0.0) or np.any(weight1 <= 0.0):
            raise SingularSystem("elliptic weights must be positive")
        self.grid = grid
        h = grid.h_x
        n = grid.n_x
        self.M = grid.w_x * weight0
        self.wbar = 0.5 * (weight1[:-1] + weight1[1:]) / h  # half-node flux weights
        diag = self.M.copy()
        diag[:-1] += self.wbar
        diag[1:] += self.wbar
        self.diag = diag
        self.off = -self.wbar
        ab = np.zeros((2, n))
        ab[0, 1:] = self.off
        ab[1, :] = diag
        try:
            self._chol = cholesky_banded(ab, lower=False)
        except np.linalg.LinAlgError as exc:  # pragma: no cover - SPD by construction
            raise SingularSystem(str(exc)) from exc

    def apply_K(self, u: np.ndarray) -> np.ndarray:
        """Stiffness part K u (zero on constants)."""
        out = np.zeros_like(u)
        d = np.diff(u)
        out[:-1] -= self.wbar * d
        out[1:] += self.wbar * d
        return out

    def apply_S(self, u: np.ndarray) -> np.ndarray:
        return self.M * u + self.apply_K(u)

    def solve_weak(self, b: np.ndarray) -> np.ndarray:
        """Solve S u = b for an already w_x-weighted right-hand side."""
        if b.ndim == 1:
            return cho_solve_banded((self._chol, False), b)
        return cho_solve_banded((self._chol, False), b)

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """Solve for a strong-form right-hand side (nodal values of rhs)."""
        return self.solve_weak(self.grid.w_x * rhs)


def solve_elliptic(rhs: np.ndarray, weight0: np.ndarray, weight1: np.ndarray,
                   grid: PhaseGrid) -> np.ndarray:
    """One-shot solve of weight0 u - (weight1 u')' = rhs."""
    return EllipticOperator(weight0, weight1, grid).solve(rhs)


@dataclass
class OperatorKit:
    """Per-(model, grid) cache: elliptic factorization and the
    skew-symmetrized velocity differentiation matrix."""

    model: EquilibriumModel
    grid: PhaseGrid
    ell: EllipticOperator
    Dv_skew: np.ndarray

    def u_of_A(self, f: np.ndarray) -> np.ndarray:
        """Spatial potential u of the auxiliary operator: solves the
        elliptic kernel with rhs = -d/dx flux(f)."""
        j = flux(f, self.grid)
        return self.ell.solve(-self.grid.dx(j))

    def u_of_resolvent(self, f: np.ndarray) -> np.ndarray:
        """u = rho(g)/rho_F for g the resolvent image of f; solves the
        kernel with rhs = rho(f)."""
        return self.ell.solve(density(f, self.grid))

    def flux_of_T(self, f: np.ndarray) -> np.ndarray:
        """Closed form of the velocity flux of T f: d/dx sigma + V' rho,
        free of velocity differencing."""
        return self.grid.dx(second_moment(f, self.grid)) + self.model.dV_x * density(f, self.grid)

    def u_of_ATPi(self, r: np.ndarray) -> np.ndarray:
        """u with S u = K r, the conservative route used for the
        macroscopic coercivity bound (r = rho(f)/rho_F)."""
        return self.ell.solve_weak(self.ell.apply_K(r))


def operator_kit(model: EquilibriumModel, grid: PhaseGrid) -> OperatorKit:
    """Build-once cache attached to the model instance."""
    kit = getattr(model, "_kit", None)
    if kit is not None and kit.grid is grid:
        return kit
    ell = EllipticOperator(model.rho_F, model.m_F / model.d, grid)
    Dv = grid.Dv
    wv = grid.w_v
    adj = (Dv.T * wv[None, :]) / wv[:, None]
    kit = OperatorKit(model=model, grid=grid, ell=ell, Dv_skew=0.5 * (Dv - adj))
    object.__setattr__(model, "_kit", kit)
    return kit


def apply_T(f: np.ndarray, model: EquilibriumModel, grid: PhaseGrid) -> np.ndarray:
    """Transport operator v d/dx - V'(x) d/dv, applied in the symmetrized
    representation so the discrete operator is skew to boundary dust."""
    kit = operator_kit(model, grid)
    xi = f / model.sqrtF
    tx = grid.v[None, :] * grid.dx(xi, axis=0)
    tv = model.dV_x[:, None] * (xi @ kit.Dv_skew.T)
    return model.sqrtF * (tx - tv)


def apply_Pi(f: np.ndarray, model: EquilibriumModel, grid: PhaseGrid) -> np.ndarray:
    """Projection onto local equilibria: (rho(f)/rho_F) F."""
    r = density(f, grid) / model.rho_F
    return r[:, None] * model.F


def apply_L(f: np.ndarray, model: EquilibriumModel, grid: PhaseGrid) -> np.ndarray:
    """Relaxation operator Pi f - f."""
    return apply_Pi(f, model, grid) - f


def apply_b(f: np.ndarray, model: EquilibriumModel, grid: PhaseGrid) -> np.ndarray:
    """(F/rho_F) * first velocity moment of f."""
    j = flux(f, grid) / model.rho_F
    return j[:, None] * model.F


def apply_a(f: np.ndarray, model: EquilibriumModel, grid: PhaseGrid) -> np.ndarray:
    """(F/rho_F) * (d/dx of the second moment + rho(f) V')."""
    kit = operator_kit(model, grid)
    return (kit.flux_of_T(f) / model.rho_F)[:, None] * model.F


def apply_ahat(f: np.ndarray, model: EquilibriumModel, grid: PhaseGrid) -> np.ndarray:
    """-(F/rho_F) * d/dx rho(f)."""
    g = -grid.dx(density(f, grid)) / model.rho_F
    return g[:, None] * model.F


def apply_A(f: np.ndarray, model: EquilibriumModel, grid: PhaseGrid) -> np.ndarray:
    """Auxiliary operator: u F with u from the elliptic kernel."""
    kit = operator_kit(model, grid)
    u = kit.u_of_A(f)
    return u[:, None] * model.F


def apply_TA(f: np.ndarray, model: EquilibriumModel, grid: PhaseGrid) -> np.ndarray:
    """T applied to the range of the auxiliary operator: v F du/dx."""
    kit = operator_kit(model, grid)
    du = grid.dx(kit.u_of_A(f))
    return (grid.v[None, :] * model.F) * du[:, None]


def apply_A_star(h: np.ndarray, model: EquilibriumModel, grid: PhaseGrid) -> np.ndarray:
    """Exact discrete adjoint of the auxiliary operator in the weighted
    inner product, assembled by transposing its composition."""
    kit = operator_kit(model, grid)
    s = kit.ell.solve_weak(grid.w_x * density(h, grid))
    c = -_dx_transpose(grid.w_x * s, grid.h_x) / grid.w_x
    return (grid.v[None, :] * model.F) * c[:, None]


def dual_coefficient(model: EquilibriumModel) -> np.ndarray:
    """Spatial weight q_F - m_F^2 / rho_F of the dual-norm quadratic form
    (the 1-D collapse of the tensor coefficient; nonnegative by the
    Cauchy-Schwarz inequality on velocity moments)."""
    return model.q_F - model.m_F**2 / model.rho_F


def dual_norm_AT_perp(f: np.ndarray, model: EquilibriumModel, grid: PhaseGrid) -> float:
    """Squared dual norm of the micro-transport composition: the weighted
    second-derivative quadratic form of the resolvent potential."""
    kit = operator_kit(model, grid)
    u = kit.u_of_resolvent(f)
    upp = grid.d2x(u)
    return float(np.sum(grid.w_x * dual_coefficient(model) * upp**2))


def recenter(f: np.ndarray, model: EquilibriumModel, grid: PhaseGrid) -> np.ndarray:
    """Remove the conserved component: subtract (total mass of f) * F."""
    mass = float(grid.w_x @ (f @ grid.w_v))
    return f - mass * model.F
