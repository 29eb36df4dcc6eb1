"""External potentials, equilibrium families and hypothesis certification.

Two steady-state families are supported:

* Maxwellian: F(x,v) = (2 pi)^{-1/2} exp(-v^2/2) exp(-V(x)), Gaussian in v.
* Fast diffusion: F(x,v) = omega (v^2/2 + V(x))^{-(k+1)} with algebraic
  tails, V = (1+x^2)^beta.

The model tabulates F and its velocity moments on the grid's quadrature so
that discrete identities (e.g. rho(Pi f) = rho(f)) hold exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .errors import HypothesisFailed, InvalidExponent, NonIntegrable
from .grid import PhaseGrid, density, second_moment

__all__ = [
    "Potential",
    "gaussian_potential",
    "power_potential",
    "fast_diffusion_potential",
    "EquilibriumModel",
    "build_equilibrium",
    "moment_tables",
    "HypothesisReport",
    "check_hypotheses",
]

MAXWELLIAN = "maxwellian"
FAST_DIFFUSION = "fast_diffusion"


@dataclass(frozen=True)
class Potential:
    """Confining external potential with evaluators for V, V' and V''."""

    family: str  # "power_quadratic" or "general_callback"
    V: Callable[[np.ndarray], np.ndarray]
    dV: Callable[[np.ndarray], np.ndarray]
    d2V: Callable[[np.ndarray], np.ndarray]
    exponent: Optional[float] = None  # k (Maxwellian) or beta (fast diffusion)
    C: float = 1.0


def gaussian_potential() -> Potential:
    """V = x^2/2 + log(2 pi)/2, normalized so that int exp(-V) dx = 1."""
    c = 0.5 * np.log(2.0 * np.pi)
    return Potential(
        family="power_quadratic",
        V=lambda x: 0.5 * x**2 + c,
        dV=lambda x: np.asarray(x, dtype=float) + 0.0,
        d2V=lambda x: np.ones_like(np.asarray(x, dtype=float)),
        exponent=2.0,
        C=0.5,
    )


def power_potential(k: float, C: Optional[float] = None) -> Potential:
    """V = C (1+x^2)^{k/2} with k > 1.

    When C is omitted it is solved numerically from the normalization
    int exp(-V) dx = 1 (the constant has no closed form).
    """
    if k <= 1.0:
        raise InvalidExponent(f"power potential needs k > 1, got {k}")
    if C is None:
        def mass(c):
            val, _ = quad(lambda x: np.exp(-c * (1.0 + x * x) ** (k / 2.0)),
                          -np.inf, np.inf)
            return val - 1.0
        C = brentq(mass, 1e-3, 50.0, xtol=1e-14, rtol=1e-14)

    def V(x):
        return C * (1.0 + x * x) ** (k / 2.0)

    def dV(x):
        return C * k * x * (1.0 + x * x) ** (k / 2.0 - 1.0)

    def d2V(x):
        r = 1.0 + x * x
        return C * k * r ** (k / 2.0 - 1.0) + C * k * (k - 2.0) * x * x * r ** (k / 2.0 - 2.0)

    return Potential(family="power_quadratic", V=V, dV=dV, d2V=d2V, exponent=k, C=float(C))


def fast_diffusion_potential(beta: float) -> Potential:
    """V = (1+x^2)^beta for the fast-diffusion equilibrium."""
    if beta <= 0.0:
        raise InvalidExponent(f"fast-diffusion potential needs beta > 0, got {beta}")

    def V(x):
        return (1.0 + x * x) ** beta

    def dV(x):
        return 2.0 * beta * x * (1.0 + x * x) ** (beta - 1.0)

    def d2V(x):
        r = 1.0 + x * x
        return 2.0 * beta * r ** (beta - 1.0) + 4.0 * beta * (beta - 1.0) * x * x * r ** (beta - 2.0)

    return Potential(family="power_quadratic", V=V, dV=dV, d2V=d2V, exponent=beta, C=1.0)


@dataclass(frozen=True)
class EquilibriumModel:
    """Tabulated steady state and its velocity moments on a fixed grid.

    Immutable after construction; all moments come from the grid's own
    v-quadrature so downstream discrete identities are exact.
    """

    case: str
    potential: Potential
    d: int
    k: Optional[float]            # fast-diffusion exponent, None for Maxwellian
    omega: float                  # phase-space normalization constant
    F: np.ndarray                 # (N_x, N_v)
    sqrtF: np.ndarray = field(repr=False, default=None)
    V_x: np.ndarray = field(repr=False, default=None)      # V on x-nodes
    dV_x: np.ndarray = field(repr=False, default=None)
    rho_F: np.ndarray = field(repr=False, default=None)
    m_F: np.ndarray = field(repr=False, default=None)
    q_F: np.ndarray = field(repr=False, default=None)

    @property
    def exp_mV(self) -> np.ndarray:
        """exp(-V) on the x nodes."""
        return np.exp(-self.V_x)


def _raw_equilibrium(case, potential, k, grid: PhaseGrid) -> np.ndarray:
    Vx = potential.V(grid.x)[:, None]
    vv = grid.v[None, :]
    if case == MAXWELLIAN:
        return np.exp(-(0.5 * vv**2 + Vx)) / np.sqrt(2.0 * np.pi)
    return (0.5 * vv**2 + Vx) ** (-(k + 1.0))


def build_equilibrium(case, potential, d=1, k=None, grid: PhaseGrid = None) -> EquilibriumModel:
    """Tabulate F with omega fixed so the discrete mass is exactly 1."""
    if d != 1:
        raise NotImplementedError("only d = 1 grids are implemented")
    if case == FAST_DIFFUSION:
        if k is None or k <= d / 2.0 + 1.0:
            raise InvalidExponent(f"fast diffusion requires k > d/2 + 1 = {d/2 + 1}, got {k}")
    elif case != MAXWELLIAN:
        raise ValueError(f"unknown case '{case}'")

    raw = _raw_equilibrium(case, potential, k, grid)
    mass = float(grid.w_x @ (raw @ grid.w_v))
    if not np.isfinite(mass) or mass <= 0.0:
        raise NonIntegrable("equilibrium mass is not finite on the grid")

    # truncation check: recompute the mass on a domain twice as large; for a
    # confining potential the relative growth must stay below tolerance
    big = PhaseGrid(
        x=np.linspace(-2 * grid.L_x, 2 * grid.L_x, 2 * grid.n_x - 1),
        v=grid.v, w_x=None, w_v=grid.w_v, L_x=2 * grid.L_x, L_v=grid.L_v,
        h_x=grid.h_x, v_quadrature=grid.v_quadrature,
    )
    w_big = np.full(big.x.size, big.h_x)
    w_big[0] = w_big[-1] = 0.5 * big.h_x
    raw_big = _raw_equilibrium(case, potential, k, big)
    mass_big = float(w_big @ (raw_big @ grid.w_v))
    growth = abs(mass_big - mass) / mass
    tol = 1e-6 if case == MAXWELLIAN else 1e-3
    if growth > tol:
        raise NonIntegrable(
            f"mass grows by {growth:.2e} when doubling the truncation radius")

    omega = 1.0 / mass
    F = omega * raw
    model = EquilibriumModel(
        case=case, potential=potential, d=d,
        k=None if case == MAXWELLIAN else float(k),
        omega=omega, F=F, sqrtF=np.sqrt(F),
        V_x=np.asarray(potential.V(grid.x), dtype=float),
        dV_x=np.asarray(potential.dV(grid.x), dtype=float),
        rho_F=density(F, grid),
        m_F=second_moment(F, grid),
        q_F=F @ (grid.w_v * grid.v**4),
    )
    if np.any(model.rho_F <= 0.0) or np.any(F <= 0.0):
        raise NonIntegrable("equilibrium lost positivity on the grid")
    return model


def moment_tables(model: EquilibriumModel, grid: PhaseGrid):
    """(rho_F, m_F, q_F) on the x grid, all strictly positive."""
    return model.rho_F, model.m_F, model.q_F


@dataclass(frozen=True)
class HypothesisReport:
    """Numerical certificates for the pointwise and integral hypotheses."""

    normalization_defect: float
    Lambda: Optional[float]
    theta: float
    c0: float
    c1: float
    gradV_moment: float
    satisfied: dict
    truncation_radius: float
    kappa: Optional[float] = None

    def __str__(self):
        ok = {k: ("ok" if v else "FAILED") for k, v in self.satisfied.items()}
        return (
            f"normalization defect {self.normalization_defect:.3e}; "
            f"Lambda={self.Lambda}; theta={self.theta:.3g}, c0={self.c0:.6g}, "
            f"c1={self.c1:.6g}, kappa={self.kappa}; "
            f"|gradV|^2 moment {self.gradV_moment:.6g}; checks {ok} "
            f"(certified to |x| <= {self.truncation_radius:g})"
        )


def check_hypotheses(model: EquilibriumModel, grid: PhaseGrid,
                     theta_search_grid=None, Lambda=None) -> HypothesisReport:
    """Certify the Maxwellian hypotheses on the grid (and at twice the
    truncation radius), scanning theta for the pair (theta, c0) that
    maximizes the improved-Poincare constant kappa.

    The fast-diffusion case replaces the spectral-gap hypothesis by a
    Hardy-Poincare inequality; see the spectrum module.
    """
    if model.case != MAXWELLIAN:
        raise ValueError("hypothesis certification applies to the Maxwellian case")
    if theta_search_grid is None:
        theta_search_grid = np.arange(0.1, 0.95, 0.1)
    if Lambda is None:
        from .spectrum import GapProblem, poincare_constant  # lazy: avoids a cycle
        w = model.exp_mV
        Lambda = poincare_constant(GapProblem(weight_num=w, weight_grad=w), grid)

    pot = model.potential
    # certify out to twice the truncation radius on a dense auxiliary grid
    xs = np.linspace(-2.0 * grid.L_x, 2.0 * grid.L_x, 4 * grid.n_x - 3)
    dV = pot.dV(xs)
    d2V = pot.d2V(xs)
    if not (np.all(np.isfinite(pot.V(xs))) and np.all(np.isfinite(dV)) and np.all(np.isfinite(d2V))):
        raise HypothesisFailed("H1", int(np.argmax(~np.isfinite(pot.V(xs)))))

    mass = float(np.sum(grid.w_x * model.exp_mV))
    normalization_defect = abs(mass - 1.0)

    best = None
    for theta in theta_search_grid:
        c0 = max(float(np.max(d2V - 0.5 * theta * dV**2)), 1e-12)
        kappa = (1.0 - theta) / (2.0 * (2.0 + Lambda * c0))
        if best is None or kappa > best[2]:
            best = (float(theta), c0, kappa)
    theta, c0, kappa = best

    c1 = float(np.max(np.abs(d2V) / (1.0 + np.abs(dV))))
    gradV_moment = float(np.sum(grid.w_x * model.dV_x**2 * model.exp_mV))

    satisfied = {
        "H1": True,
        "H2": normalization_defect <= 1e-6,
        "H3": Lambda is not None and Lambda > 0.0,
        "H4": bool(np.all(d2V <= 0.5 * theta * dV**2 + c0 * (1.0 + 1e-12))),
        "H5": bool(np.all(np.abs(d2V) <= c1 * (1.0 + np.abs(dV)) * (1.0 + 1e-12))),
        "H6": np.isfinite(gradV_moment),
    }
    for name in ("H4", "H5"):
        if not satisfied[name]:
            if name == "H4":
                bad = int(np.argmax(d2V - 0.5 * theta * dV**2 - c0))
            else:
                bad = int(np.argmax(np.abs(d2V) - c1 * (1.0 + np.abs(dV))))
            raise HypothesisFailed(name, bad)

    return HypothesisReport(
        normalization_defect=normalization_defect,
        Lambda=float(Lambda),
        theta=theta, c0=c0, c1=c1,
        gradV_moment=gradV_moment,
        satisfied=satisfied,
        truncation_radius=2.0 * grid.L_x,
        kappa=kappa,
    )
