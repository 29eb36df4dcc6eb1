"""Spectral-gap constants from weighted Sturm-Liouville eigenproblems.

The generalized pencil K u = mu M u uses the same conservative stiffness
assembly as the elliptic kernel, so coercivity bounds certified here hold
exactly for the discrete evolution operators.  The constant mode is an
exact null vector (natural boundary conditions); the gap is the smallest
nonzero eigenvalue and the Poincare-type constant is its reciprocal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import NoGap
from .grid import PhaseGrid
from .model import EquilibriumModel
from .sampling import random_spatial

__all__ = [
    "GapProblem",
    "GapResult",
    "solve_gap",
    "poincare_constant",
    "hardy_poincare_constant",
    "improved_poincare_check",
    "weighted_hardy_check",
    "InequalityReport",
]


@dataclass(frozen=True)
class GapProblem:
    """Weights of the quadratic-form pair: L2 side (weight_num) and
    gradient side (weight_grad), both positive spatial fields."""

    weight_num: np.ndarray
    weight_grad: np.ndarray


@dataclass(frozen=True)
class GapResult:
    Lambda: float
    mu1: float
    residual: float
    mean_defect: float
    eigenvector: np.ndarray

    def report(self, grid: PhaseGrid) -> str:
        return (
            f"Lambda = {self.Lambda:.10g}\nmu1 = {self.mu1:.10g}\n"
            f"residual = {self.residual:.3e}\nmean_defect = {self.mean_defect:.3e}\n"
            f"truncation_radius = {grid.L_x:g}\nresolution = {grid.n_x}\n"
        )


def _stiffness(weight_grad: np.ndarray, grid: PhaseGrid):
    wbar = 0.5 * (weight_grad[:-1] + weight_grad[1:]) / grid.h_x
    diag = np.zeros(grid.n_x)
    diag[:-1] += wbar
    diag[1:] += wbar
    return diag, -wbar


def solve_gap(problem: GapProblem, grid: PhaseGrid) -> GapResult:
    """Smallest nonzero eigenvalue of the pencil restricted to the
    mean-zero subspace (the constant null mode deflates by M-orthogonality
    of the symmetric pencil's eigenvectors)."""
    if np.any(problem.weight_num <= 0.0) or np.any(problem.weight_grad <= 0.0):
        raise NoGap("gap problem weights must be positive")
    M = grid.w_x * problem.weight_num
    kd, ko = _stiffness(problem.weight_grad, grid)
    s = 1.0 / np.sqrt(M)
    cd = kd * s * s
    co = ko * s[:-1] * s[1:]
    vals, vecs = eigh_tridiagonal(cd, co, select="i", select_range=(0, 1))
    mu1 = float(vals[1])
    if mu1 <= 1e-12:
        raise NoGap(f"smallest nonzero eigenvalue {mu1:.3e} <= 1e-12")
    u1 = s * vecs[:, 1]
    u1 /= np.sqrt(u1 @ (M * u1))
    # residual of K u1 = mu1 M u1, relative to the stiffness image
    ku = np.zeros_like(u1)
    d = np.diff(u1)
    wbar = -ko
    ku[:-1] -= wbar * d
    ku[1:] += wbar * d
    res = np.linalg.norm(ku - mu1 * M * u1) / max(np.linalg.norm(ku), 1e-300)
    mean_defect = abs(float(np.sum(M * u1)))
    return GapResult(Lambda=1.0 / mu1, mu1=mu1, residual=float(res),
                     mean_defect=mean_defect, eigenvector=u1)


def poincare_constant(problem: GapProblem, grid: PhaseGrid) -> float:
    """Best constant in the weighted Poincare inequality for the pencil."""
    return solve_gap(problem, grid).Lambda


def hardy_poincare_constant(model: EquilibriumModel, grid: PhaseGrid) -> float:
    """Hardy-Poincare constant for the algebraic-tail equilibrium, with the
    pencil weights (rho_F, V rho_F) (i.e. w_0^2 and w_1^2)."""
    if model.case != "fast_diffusion":
        raise ValueError("Hardy-Poincare constant applies to the fast-diffusion case")
    problem = GapProblem(weight_num=model.rho_F,
                         weight_grad=model.V_x * model.rho_F)
    return solve_gap(problem, grid).Lambda


@dataclass(frozen=True)
class InequalityReport:
    min_slack: float
    passed: bool
    extras: dict


def improved_poincare_check(model: EquilibriumModel, kappa: float, grid: PhaseGrid,
                            num_samples: int = 100, seed: int = 0) -> InequalityReport:
    """Check kappa ||W u||_0^2 <= ||u'||_0^2 (W = |V'|) on smooth random
    mean-zero samples; slack must stay >= -1e-8."""
    rng = np.random.default_rng(seed)
    w = model.exp_mV
    wtot = float(np.sum(grid.w_x * w))
    W2 = model.dV_x**2
    worst = np.inf
    for _ in range(num_samples):
        u = random_spatial(grid, rng)
        u = u - np.sum(grid.w_x * w * u) / wtot
        lhs = kappa * float(np.sum(grid.w_x * W2 * u**2 * w))
        rhs = float(np.sum(grid.w_x * grid.dx(u) ** 2 * w))
        worst = min(worst, rhs - lhs)
    return InequalityReport(min_slack=worst, passed=worst >= -1e-8,
                            extras={"kappa": kappa, "num_samples": num_samples})


def weighted_hardy_check(model: EquilibriumModel, alpha: float = None,
                         grid: PhaseGrid = None, num_samples: int = 100,
                         seed: int = 0) -> InequalityReport:
    """Empirical best constant of the variance-form Hardy inequality with
    the algebraic weights; reports the implied exponent bound beta0_hat and
    whether the model's beta sits below it."""
    beta = model.potential.exponent
    if alpha is None:
        alpha = 1.0 - 1.0 / beta
    q = model.k + 1.0 - model.d / 2.0
    V = model.V_x
    w_l = V ** (alpha + 1.0 - q - 1.0 / beta)
    w_r = V ** (alpha + 1.0 - q)
    wtot = float(np.sum(grid.w_x * w_l))
    rng = np.random.default_rng(seed)
    sup_ratio = 0.0
    for _ in range(num_samples):
        u = random_spatial(grid, rng)
        mean = np.sum(grid.w_x * w_l * u) / wtot
        lhs = float(np.sum(grid.w_x * w_l * u**2)) - wtot * mean**2
        rhs = float(np.sum(grid.w_x * w_r * grid.dx(u) ** 2))
        if rhs > 0.0:
            sup_ratio = max(sup_ratio, lhs / rhs)
    beta0_hat = 1.0 + 0.5 / np.sqrt(sup_ratio) if sup_ratio > 0.0 else np.inf
    return InequalityReport(
        min_slack=0.0, passed=beta < beta0_hat,
        extras={"beta0_hat": beta0_hat, "sup_ratio": sup_ratio, "beta": beta},
    )
