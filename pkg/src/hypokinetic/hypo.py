"""Modified entropy, its dissipation, and the explicit decay-rate ledger.

For a mean-zero perturbation g the modified entropy is

    H(g) = 1/2 ||g||^2 + eps <A g, g>,

with A = (1 + (a Pi)^hat)^(-1) a^hat b acting through the spatial elliptic
solve, and along the flow

    dH/dt = <g, Lg> - eps <A T Pi g, g> - eps <A T (1-Pi) g, g>
            + eps <T A g, g> + eps <L g, (A + A*) g>.

Every term is evaluated in a closed spatial form (no velocity derivative
appears), so the identities used by the decay estimate hold at the
discrete level.  The ledger assembles the explicit constants

    kappa = (1 - theta) / (2 (2 + Lambda c0)),
    lambda1 = 1 - c2 c4 / 2 - 5 eps / 2,
    lambda2 = Lambda eps / (1 + Lambda) - eps^2 / (2 c2),   c2 = a eps,

and the decay rate lambda = min(lambda1, lambda2); the entropy is
equivalent to the squared norm with factors 1 -+ eps / sqrt(2).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import DegenerateWindow, Infeasible
from .grid import PhaseGrid, density, flux, inner_mu, norm_mu
from .model import EquilibriumModel
from .ops import (apply_A, apply_A_star, apply_Pi, dual_coefficient,
                  dual_norm_AT_perp, operator_kit, recenter)
from .sampling import random_recentered_field

__all__ = [
    "HypoReport",
    "ConstantsLedger",
    "lyapunov_H",
    "dissipation_D",
    "observe",
    "constants_ledger",
    "estimate_c4",
    "optimize_epsilon",
    "check_gronwall",
    "fit_decay_rate",
    "check_operator_estimate",
]


@dataclass
class HypoReport:
    """Observables of one recorded state g = f - F."""

    t: float
    norm2: float
    pi_norm2: float
    perp_norm2: float
    H: float
    D_total: float
    D_terms: Tuple[float, float, float, float, float]
    gronwall_slack: float = 0.0


@dataclass
class ConstantsLedger:
    """Explicit constants of the decay estimate, with feasibility flag."""

    Lambda: float
    theta: float
    c0: float
    c1: float
    kappa: float
    a: float
    eps: float
    c2: float
    c4: float
    lambda1: float
    lambda2: float
    lam: float
    eta: float
    feasible: bool

    def lines(self) -> list:
        return [
            f"Lambda  = {self.Lambda:.6g}",
            f"theta   = {self.theta:.6g}",
            f"c0      = {self.c0:.6g}",
            f"c1      = {self.c1:.6g}",
            f"kappa   = {self.kappa:.6g}",
            f"a       = {self.a:.6g}",
            f"eps     = {self.eps:.6g}",
            f"c2      = {self.c2:.6g}",
            f"c4      = {self.c4:.6g}",
            f"lambda1 = {self.lambda1:.6g}",
            f"lambda2 = {self.lambda2:.6g}",
            f"lambda  = {self.lam:.6g}",
            f"eta     = {self.eta:.6g}",
            f"feasible = {self.feasible}",
        ]


def lyapunov_H(g: np.ndarray, eps: float, model: EquilibriumModel,
               grid: PhaseGrid) -> float:
    """H(g) = 1/2 ||g||^2 + eps <A g, g>; <A g, g> reduces to a spatial
    integral of the elliptic solution against the density of g."""
    kit = operator_kit(model, grid)
    u = kit.u_of_A(g)
    afg = float(grid.w_x @ (u * density(g, grid)))
    return 0.5 * norm_mu(g, grid, model) ** 2 + eps * afg


def dissipation_D(g: np.ndarray, eps: float, model: EquilibriumModel,
                  grid: PhaseGrid) -> Tuple[float, Tuple[float, ...]]:
    """The five dissipation terms and their sum, each in spatial form."""
    kit = operator_kit(model, grid)
    pg = apply_Pi(g, model, grid)
    perp = g - pg

    d1 = -norm_mu(perp, grid, model) ** 2                       # <g, Lg>

    r = density(g, grid) / model.rho_F
    u_pi = kit.u_of_ATPi(r)
    val_atpi = float((r * model.rho_F * grid.w_x) @ u_pi)       # <A T Pi g, g>
    d2 = -eps * val_atpi

    u_t = kit.ell.solve(-grid.dx(kit.flux_of_T(g)))
    val_at = float(grid.w_x @ (u_t * density(g, grid)))         # <A T g, g>
    d3 = -eps * (val_at - val_atpi)

    u_a = kit.u_of_A(g)
    d4 = eps * float(grid.w_x @ (grid.dx(u_a) * flux(g, grid)))  # <T A g, g>

    ag = apply_A(g, model, grid)
    asg = apply_A_star(g, model, grid)
    d5 = eps * inner_mu(-perp, ag + asg, grid, model)            # <Lg, (A+A*)g>

    terms = (d1, d2, d3, d4, d5)
    return float(sum(terms)), terms


def observe(g: np.ndarray, eps: float, model: EquilibriumModel,
            grid: PhaseGrid, t: float) -> HypoReport:
    pg = apply_Pi(g, model, grid)
    pi2 = norm_mu(pg, grid, model) ** 2
    perp2 = norm_mu(g - pg, grid, model) ** 2
    d_tot, terms = dissipation_D(g, eps, model, grid)
    return HypoReport(
        t=t, norm2=pi2 + perp2, pi_norm2=pi2, perp_norm2=perp2,
        H=lyapunov_H(g, eps, model, grid), D_total=d_tot, D_terms=terms,
    )


def constants_ledger(Lambda: float, theta: float, c0: float, c1: float,
                     c4: float, a: float, eps: float) -> ConstantsLedger:
    """Assemble the explicit constant chain for given (a, eps)."""
    if a <= 0.5 * (1.0 + 1.0 / Lambda):
        raise Infeasible(
            f"a = {a:.4g} violates a > (1 + 1/Lambda)/2 = "
            f"{0.5 * (1 + 1 / Lambda):.4g}")
    kappa = (1.0 - theta) / (2.0 * (2.0 + Lambda * c0))
    c2 = a * eps
    lambda1 = 1.0 - 0.5 * c2 * c4 - 2.5 * eps
    lambda2 = Lambda * eps / (1.0 + Lambda) - eps ** 2 / (2.0 * c2)
    lam = min(lambda1, lambda2)
    eta = 2.0 * eps / (1.0 - eps) if eps < 1.0 else np.inf
    return ConstantsLedger(
        Lambda=Lambda, theta=theta, c0=c0, c1=c1, kappa=kappa, a=a,
        eps=eps, c2=c2, c4=c4, lambda1=lambda1, lambda2=lambda2,
        lam=lam, eta=eta, feasible=(lambda1 > 0.0 and lambda2 > 0.0),
    )


def estimate_c4(model: EquilibriumModel, grid: PhaseGrid,
                num_samples: int = 64, seed: int = 0,
                inflation: float = 1.1) -> float:
    """Upper estimate of sup ||(A T (1-Pi))* g||^2 / ||g||^2.

    The supremum is attained on densities, where the quotient is the top
    eigenvalue of a spatial pencil; random sampling over phase-space
    fields is combined with a power iteration on that pencil and the
    result inflated by a safety factor.
    """
    kit = operator_kit(model, grid)
    rng = np.random.default_rng(seed)
    best = 0.0
    for _ in range(num_samples):
        g = random_recentered_field(model, grid, rng)
        val = dual_norm_AT_perp(g, model, grid) / norm_mu(g, grid, model) ** 2
        best = max(best, val)

    # power iteration on r -> M^{-1} Z r with Z = M S^-1 D2^T Wc D2 S^-1 M
    wc = grid.w_x * dual_coefficient(model)
    m_diag = grid.w_x * model.rho_F
    r = rng.standard_normal(grid.n_x)
    r -= (m_diag @ r) / m_diag.sum()
    lam_it = 0.0
    for _ in range(300):
        u = kit.ell.solve_weak(m_diag * r)
        y = _d2x_transpose(wc * grid.d2x(u), grid.h_x)
        r_new = kit.ell.solve_weak(y)
        lam_it = float((r * m_diag) @ r_new) / float((r * m_diag) @ r)
        r_new -= (m_diag @ r_new) / m_diag.sum()
        r = r_new / np.sqrt((r_new * m_diag) @ r_new)
    return inflation * max(best, lam_it)


def _d2x_transpose(y: np.ndarray, h: float) -> np.ndarray:
    """Exact transpose of the second-difference stencil used by d2x
    (interior centered rows, end rows replicated)."""
    out = np.zeros_like(y)
    yy = y[1:-1].copy()
    yy[0] += y[0]
    yy[-1] += y[-1]
    out[:-2] += yy / h ** 2
    out[1:-1] -= 2.0 * yy / h ** 2
    out[2:] += yy / h ** 2
    return out


def optimize_epsilon(Lambda: float, c4: float,
                     a: Optional[float] = None) -> Tuple[float, float, float]:
    """Maximize lambda = min(lambda1, lambda2) over eps (golden section)
    and, when a is not pinned, over a logarithmic grid of admissible a.

    Returns (eps, lam, a); raises Infeasible when no positive rate exists.
    """
    a_floor = 0.5 * (1.0 + 1.0 / Lambda)
    a_grid = [a] if a is not None else list(
        a_floor * np.logspace(np.log10(1.02), 2.0, 80))
    best = (0.0, 0.0, a_floor * 1.1)
    for aa in a_grid:
        if aa <= a_floor:
            continue
        eps_hi = min(1.0 / np.sqrt(2.0) * 0.999,
                     1.0 / (0.5 * aa * c4 + 2.5))

        def lam_of(eps, aa=aa):
            led = constants_ledger(Lambda, 0.5, 1.0, 1.0, c4, aa, eps)
            return led.lam

        eps_star = _golden_max(lam_of, 1e-8, eps_hi)
        val = lam_of(eps_star)
        if val > best[1]:
            best = (eps_star, val, aa)
    if best[1] <= 0.0:
        raise Infeasible("no (eps, a) yields min(lambda1, lambda2) > 0")
    return best


def _golden_max(fn, lo, hi, iters=80):
    phi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c, d = b - phi * (b - a), a + phi * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(iters):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - phi * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + phi * (b - a)
            fd = fn(d)
    return 0.5 * (a + b)


def check_gronwall(reports: Sequence[HypoReport], lam: float,
                   tol: Optional[float] = None) -> Tuple[bool, float]:
    """Fill in D + lam * H slacks; pass iff max slack <= tol
    (default 1e-6 times the initial squared norm)."""
    if tol is None:
        tol = 1e-6 * reports[0].norm2
    worst = -np.inf
    for rep in reports:
        rep.gronwall_slack = rep.D_total + lam * rep.H
        worst = max(worst, rep.gronwall_slack)
    return worst <= tol, worst


def fit_decay_rate(times: np.ndarray, values: np.ndarray,
                   window: Optional[Tuple[float, float]] = None,
                   floor: float = 1e-25) -> Tuple[float, float]:
    """Least-squares slope of log(values) over the window; returns
    (rate, r_squared) with rate > 0 for decay."""
    times = np.asarray(times, float)
    values = np.asarray(values, float)
    if window is None:
        window = (times[-1] / 4.0, times[-1])
    mask = (times >= window[0]) & (times <= window[1]) & (values > floor)
    if mask.sum() < 10:
        raise DegenerateWindow(
            f"only {int(mask.sum())} usable samples in window {window}")
    t, y = times[mask], np.log(values[mask])
    slope, intercept = np.polyfit(t, y, 1)
    resid = y - (slope * t + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return -float(slope), r2


def check_operator_estimate(g: np.ndarray, model: EquilibriumModel,
                            grid: PhaseGrid) -> float:
    """Slack of 2 ||A g||^2 + ||T A g||^2 <= ||(1 - Pi) g||^2
    (nonnegative slack means the bound holds)."""
    kit = operator_kit(model, grid)
    perp = g - apply_Pi(g, model, grid)
    u = kit.u_of_A(g)
    ag2 = float(grid.w_x @ (model.rho_F * u ** 2))
    tag2 = float(u @ kit.ell.apply_K(u))
    return norm_mu(perp, grid, model) ** 2 - 2.0 * ag2 - tag2
