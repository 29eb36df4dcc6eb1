import numpy as np
import pytest

from hypokinetic import (GapProblem, NoGap, hardy_poincare_constant,
                         improved_poincare_check, make_grid,
                         poincare_constant, solve_gap, weighted_hardy_check)
from hypokinetic.model import check_hypotheses
from hypokinetic.spectrum import solve_gap as _solve


def test_gaussian_gap_is_one(mx):
    # Rayleigh quotient of u = x is exactly 1 for the Gaussian weight
    g, m = mx
    w = m.exp_mV
    lam = poincare_constant(GapProblem(weight_num=w, weight_grad=w), g)
    assert lam == pytest.approx(1.0, rel=1e-3)


def test_gap_eigenvector_quality(mx):
    g, m = mx
    w = m.exp_mV
    res = solve_gap(GapProblem(weight_num=w, weight_grad=w), g)
    assert res.residual < 1e-10
    assert abs(res.mean_defect) < 1e-10
    # u = x is the exact first nontrivial mode; compare in the weighted
    # norm (nodes far in the Gaussian tail carry no weight)
    u = res.eigenvector
    mw = g.w_x * w
    c = float((u * mw) @ g.x) / float((g.x * mw) @ g.x)
    err = np.sqrt(float(((u - c * g.x) ** 2 * mw).sum())
                  / float((g.x ** 2 * mw).sum()))
    assert err < 1e-3


def test_constant_weight_scaling():
    # uniform weight on [-L, L]: Neumann Laplacian gap (pi/2L)^2
    g = make_grid(n_x=513, n_v=8, L_x=3.0)
    w = np.ones(g.n_x)
    res = solve_gap(GapProblem(weight_num=w, weight_grad=w), g)
    mu_exact = (np.pi / (2 * g.L_x)) ** 2
    assert res.Lambda == pytest.approx(1.0 / mu_exact, rel=1e-4)


def test_no_gap_raised(mx):
    g, m = mx
    with pytest.raises(NoGap):
        solve_gap(GapProblem(weight_num=np.ones(g.n_x),
                             weight_grad=np.zeros(g.n_x)), g)


def test_hardy_poincare_positive(fd):
    g, m = fd
    lam = hardy_poincare_constant(m, g)
    assert lam > 0
    # the macroscopic pencil (rho_F, m_F) is the Hardy pencil rescaled by
    # m_F = (2/(2k-1)) V rho_F, so the constants are exactly proportional
    # (up to the velocity truncation of the tabulated moment m_F)
    macro = solve_gap(GapProblem(weight_num=m.rho_F, weight_grad=m.m_F), g)
    assert macro.Lambda == pytest.approx(lam * (2 * 3 - 1) / 2.0, rel=1e-5)


def test_improved_poincare(mx):
    g, m = mx
    rep = check_hypotheses(m, g)
    out = improved_poincare_check(m, rep.kappa, g, num_samples=50, seed=0)
    assert out.passed
    assert out.min_slack >= -1e-8


def test_weighted_hardy(fd):
    g, m = fd
    out = weighted_hardy_check(m, grid=g, num_samples=50, seed=0)
    assert out.passed
    assert out.extras["beta0_hat"] > 1.2
