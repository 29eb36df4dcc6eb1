"""Acceptance suite: the certified behaviors of the package, one test per
criterion, each printing a single PASS/FAIL summary line."""

import time

import numpy as np
import pytest

from hypokinetic import (check_gronwall, check_hypotheses,
                         check_operator_estimate, fit_decay_rate, run,
                         step_strang)
from hypokinetic.cli import get_preset, _constants_for, _initial_data
from hypokinetic.grid import inner_mu, norm_mu
from hypokinetic.ops import apply_Pi, dual_coefficient, operator_kit
from hypokinetic.sampling import random_phase_field, random_recentered_field
from hypokinetic.spectrum import GapProblem, poincare_constant


def _report(name, ok, detail):
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, detail


@pytest.fixture(scope="module")
def mx_run(mx):
    """Shared density-wave run with optimized constants (criteria 5, 6, 10)."""
    g, m = mx
    sc = get_preset("maxwellian_quadratic")
    ledger = _constants_for(sc, m, g)
    f0 = _initial_data(sc, m, g)
    traj = run(f0, sc.t_end, sc.dt, sc.record_every, m, g, ledger.eps)
    return g, m, ledger, traj


def test_criterion_01_relaxation_only_rate(mx):
    g, m = mx
    t0 = time.time()
    f0 = m.F * (1 + 0.1 * g.v[None, :])
    f0 /= float(g.w_x @ (f0 @ g.w_v))
    traj = run(f0, 10.0, 0.01, 1, m, g, eps=0.1, transport_enabled=False)
    rate, r2 = fit_decay_rate(traj.times, traj.norm2)
    elapsed = time.time() - t0
    ok = abs(rate - 2.0) <= 1e-3 and elapsed < 5.0
    _report("relaxation-only exact rate", ok,
            f"fitted {rate:.6f} (want 2 +- 1e-3), r^2={r2:.6f}, {elapsed:.1f}s")


def test_criterion_02_gaussian_gap(mx):
    g, m = mx
    t0 = time.time()
    w = m.exp_mV
    lam = poincare_constant(GapProblem(weight_num=w, weight_grad=w), g)
    elapsed = time.time() - t0
    ok = abs(lam - 1.0) <= 1e-3 and elapsed < 1.0
    _report("Gaussian spectral gap", ok,
            f"Lambda = {lam:.8f} (want 1 +- 1e-3), {elapsed:.2f}s")


def test_criterion_03_key_operator_estimate(mx, fd):
    t0 = time.time()
    worst = np.inf
    for g, m in (mx, fd):
        rng = np.random.default_rng(0)
        for _ in range(100):
            f = random_recentered_field(m, g, rng)
            slack = check_operator_estimate(f, m, g) \
                + 1e-6 * norm_mu(f, g, m) ** 2
            worst = min(worst, slack)
    elapsed = time.time() - t0
    ok = worst >= 0.0 and elapsed < 30.0
    _report("key operator estimate", ok,
            f"min slack of ||perp||^2 + 1e-6||f||^2 - 2||Af||^2 - ||TAf||^2 "
            f"= {worst:.3e}, {elapsed:.1f}s")


def test_criterion_04_macroscopic_coercivity(mx):
    g, m = mx
    t0 = time.time()
    kit = operator_kit(m, g)
    w = m.exp_mV
    Lam = 0.99 * poincare_constant(GapProblem(weight_num=w, weight_grad=w), g)
    bound = Lam / (1.0 + Lam)
    rng = np.random.default_rng(1)
    worst = np.inf
    for _ in range(100):
        f = random_recentered_field(m, g, rng)
        r = (f @ g.w_v) / m.rho_F
        val = float((r * m.rho_F * g.w_x) @ kit.u_of_ATPi(r))
        pf = apply_Pi(f, m, g)
        slack = val - bound * norm_mu(pf, g, m) ** 2 \
            + 1e-6 * norm_mu(f, g, m) ** 2
        worst = min(worst, slack)
    elapsed = time.time() - t0
    ok = worst >= 0.0 and elapsed < 30.0
    _report("macroscopic coercivity", ok,
            f"min <ATPi f, f> - (L/(1+L))||Pi f||^2 + 1e-6||f||^2 "
            f"= {worst:.3e}, {elapsed:.1f}s")


def test_criterion_05_gronwall(mx_run):
    g, m, ledger, traj = mx_run
    tol = 1e-6 * traj.reports[0].norm2
    ok, worst = check_gronwall(traj.reports, ledger.lam, tol=tol)
    _report("entropy Gronwall inequality", ok,
            f"max D + lambda H = {worst:.3e} (tol {tol:.1e}), "
            f"lambda = {ledger.lam:.4f}")


def test_criterion_06_decay_envelope(mx_run):
    g, m, ledger, traj = mx_run
    eta = 2.0 * ledger.eps / (1.0 - ledger.eps)
    n2 = traj.norm2
    env = (1.0 + eta) * n2[0] * np.exp(-ledger.lam * traj.times) * (1 + 1e-3)
    inside = bool(np.all(n2 <= env))
    rate, r2 = fit_decay_rate(traj.times, n2)
    ok = inside and rate >= ledger.lam
    _report("exponential decay envelope", ok,
            f"envelope holds: {inside}, observed rate {rate:.4f} >= "
            f"certified {ledger.lam:.4f} (r^2 = {r2:.4f})")


def test_criterion_07_fast_diffusion_decay(fd):
    g, m = fd
    t0 = time.time()
    sc = get_preset("fast_diffusion_default")
    ledger = _constants_for(sc, m, g)
    f0 = _initial_data(sc, m, g)
    traj = run(f0, sc.t_end, sc.dt, sc.record_every, m, g, ledger.eps)
    ok_g, worst = check_gronwall(traj.reports, ledger.lam)
    rate, r2 = fit_decay_rate(traj.times, traj.norm2)
    ebar = ledger.eps / np.sqrt(2.0)
    C = (1.0 + ebar) / (1.0 - ebar)
    env = C * traj.norm2[0] * np.exp(-ledger.lam * traj.times) * (1 + 1e-3)
    inside = bool(np.all(traj.norm2 <= env))
    elapsed = time.time() - t0
    ok = ok_g and inside and rate >= ledger.lam and ledger.feasible \
        and elapsed < 120.0
    _report("fast-diffusion certified decay", ok,
            f"rate {rate:.4f} >= {ledger.lam:.4f}, envelope C = {C:.3f} "
            f"holds: {inside}, gronwall slack {worst:.2e}, {elapsed:.0f}s")


def test_criterion_08_dual_norm_coefficient(mx):
    g, m = mx
    coeff = dual_coefficient(m)
    target = 2.0 * m.exp_mV
    rel = float(np.max(np.abs(coeff - target) / target))
    ok = rel <= 1e-8
    _report("dual-norm coefficient identity", ok,
            f"max nodewise relative error vs 2 e^-V = {rel:.3e}")


def test_criterion_09_improved_poincare(mx):
    from hypokinetic.spectrum import improved_poincare_check
    g, m = mx
    rep = check_hypotheses(m, g)
    out = improved_poincare_check(m, rep.kappa, g, num_samples=100, seed=0)
    ok = out.passed and out.min_slack >= -1e-8
    _report("improved Poincare inequality", ok,
            f"kappa = {rep.kappa:.4f}, min slack = {out.min_slack:.3e}")


def test_criterion_10_structural_identities(mx_run):
    g, m, ledger, traj = mx_run
    drift = float(np.max(np.abs(traj.mass - 1.0)))
    mono = float(np.max(np.diff(traj.norm2)))
    H = np.array([r.H for r in traj.reports])
    D = np.array([r.D_total for r in traj.reports])
    dH = np.gradient(H, traj.times)
    fd_err = float(np.max(np.abs(dH[2:-2] - D[2:-2])))
    fd_tol = 1e-6  # central-difference error is O(dt^2) and far below this
    from hypokinetic.ops import apply_A, apply_A_star
    rng = np.random.default_rng(4)
    adj = 0.0
    for _ in range(20):
        f = random_phase_field(m, g, rng)
        h = random_phase_field(m, g, rng)
        scale = norm_mu(f, g, m) * norm_mu(h, g, m)
        adj = max(adj, abs(inner_mu(apply_A(f, m, g), h, g, m)
                           - inner_mu(f, apply_A_star(h, m, g), g, m)) / scale)
    ok = drift <= 1e-9 and mono <= 1e-8 and fd_err <= fd_tol and adj <= 1e-8
    _report("structural identities", ok,
            f"mass drift {drift:.1e} <= 1e-9, norm increment {mono:.1e} "
            f"<= 1e-8, |dH/dt - D| {fd_err:.1e} <= {fd_tol:.0e}, "
            f"adjoint defect {adj:.1e} <= 1e-8")


def test_criterion_11_splitting_order(mx):
    g, m = mx
    f0 = m.F * (1 + 0.1 * np.sin(np.pi * g.x / g.L_x))[:, None]
    f0 /= float(g.w_x @ (f0 @ g.w_v))

    def final(dt, t_end=2.0):
        f = f0.copy()
        for _ in range(int(round(t_end / dt))):
            f = step_strang(f, dt, m, g)
        return f

    ref = final(0.08 / 16)
    e1 = norm_mu(final(0.08) - ref, g, m)
    e2 = norm_mu(final(0.04) - ref, g, m)
    order = float(np.log2(e1 / e2))
    ok = order >= 1.9
    _report("splitting self-convergence order", ok,
            f"errors {e1:.3e} / {e2:.3e}, order = {order:.3f} >= 1.9")
