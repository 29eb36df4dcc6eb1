"""Command-line front end: scenario parsing, presets, batch runs.

Scenarios are flat ``key = value`` files with dotted keys, e.g.::

    case = maxwellian
    grid.n_x = 257
    init.kind = density_wave
    evolve.dt = 0.01
    hypo.eps = auto

Subcommands:

* ``run`` — execute a scenario (or preset) and write trajectory.csv,
  constants.txt and report.txt into the output directory,
* ``presets`` — list the bundled scenarios,
* ``check`` — parse and validate a scenario file without running it.

Exit codes: 0 all checks passed, 1 at least one check failed, 2 error
(bad input, infeasible constants, non-finite state).
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Optional

import numpy as np

from . import evolve, hypo, spectrum
from .errors import (HypokineticError, Infeasible, ParseError,
                     ValidationError)
from .grid import PhaseGrid, make_grid
from .model import (FAST_DIFFUSION, MAXWELLIAN, build_equilibrium,
                    check_hypotheses, fast_diffusion_potential,
                    gaussian_potential)

__all__ = ["Scenario", "parse_scenario", "list_presets", "get_preset",
           "run_scenario", "main"]

CSV_HEADER = "# hypokinetic v1"


@dataclass
class Scenario:
    """Complete description of one run."""

    name: str = "custom"
    case: str = MAXWELLIAN
    beta: float = 1.2              # fast-diffusion potential exponent
    k: float = 3.0                 # fast-diffusion equilibrium exponent
    n_x: int = 257
    n_v: int = 64
    L_x: float = 8.0
    L_v: float = 8.0
    v_quadrature: str = "gauss_hermite"
    init_kind: str = "density_wave"
    init_amplitude: float = 0.1
    dt: float = 0.01
    t_end: float = 20.0
    record_every: int = 1
    transport: bool = True
    eps: Optional[float] = None    # None means optimize
    a: Optional[float] = None
    seed: int = 0


_KEYS = {
    "name": ("name", str),
    "case": ("case", str),
    "potential.beta": ("beta", float),
    "potential.k": ("k", float),
    "grid.n_x": ("n_x", int),
    "grid.n_v": ("n_v", int),
    "grid.L_x": ("L_x", float),
    "grid.L_v": ("L_v", float),
    "grid.v_quadrature": ("v_quadrature", str),
    "init.kind": ("init_kind", str),
    "init.amplitude": ("init_amplitude", float),
    "evolve.dt": ("dt", float),
    "evolve.t_end": ("t_end", float),
    "evolve.record_every": ("record_every", int),
    "evolve.transport": ("transport", None),
    "hypo.eps": ("eps", None),
    "hypo.a": ("a", None),
    "seed": ("seed", int),
}


def parse_scenario(text: str) -> Scenario:
    """Parse the flat dotted key = value format; unknown keys are errors."""
    sc = Scenario()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in _KEYS:
            raise ParseError(f"line {lineno}: unknown key {key!r}")
        attr, conv = _KEYS[key]
        try:
            if key == "evolve.transport":
                if val not in ("on", "off"):
                    raise ValueError
                parsed = (val == "on")
            elif key in ("hypo.eps", "hypo.a"):
                parsed = None if val == "auto" else float(val)
            else:
                parsed = conv(val)
        except ValueError:
            raise ParseError(f"line {lineno}: bad value {val!r} for {key}")
        setattr(sc, attr, parsed)
    _validate(sc)
    return sc


def _validate(sc: Scenario) -> None:
    if sc.case not in (MAXWELLIAN, FAST_DIFFUSION):
        raise ValidationError("case", f"unknown case {sc.case!r}")
    if sc.n_x < 8 or sc.n_v < 8:
        raise ValidationError("grid", "need at least 8 points per direction")
    if sc.L_x <= 0 or sc.L_v <= 0:
        raise ValidationError("grid", "domain half-widths must be positive")
    if sc.v_quadrature not in ("gauss_hermite", "uniform"):
        raise ValidationError("grid.v_quadrature", sc.v_quadrature)
    if sc.case == FAST_DIFFUSION and sc.v_quadrature != "uniform":
        raise ValidationError("grid.v_quadrature",
                              "fast diffusion requires uniform velocity grid")
    if sc.init_kind not in ("density_wave", "odd_mode", "shifted_maxwellian"):
        raise ValidationError("init.kind", sc.init_kind)
    if sc.dt <= 0 or sc.t_end <= 0:
        raise ValidationError("evolve", "dt and t_end must be positive")
    if sc.record_every < 1:
        raise ValidationError("evolve.record_every", "must be >= 1")
    if sc.eps is not None and not (0.0 < sc.eps < 1.0 / np.sqrt(2.0)):
        raise ValidationError("hypo.eps", "need 0 < eps < 1/sqrt(2)")
    if sc.case == FAST_DIFFUSION and sc.k <= 1.5:
        raise ValidationError("potential.k", "need k > d/2 + 1")


_PRESETS = {
    "maxwellian_quadratic": Scenario(
        name="maxwellian_quadratic", case=MAXWELLIAN,
        n_x=257, n_v=64, L_x=8.0, v_quadrature="gauss_hermite",
        init_kind="density_wave", init_amplitude=0.1,
        dt=0.01, t_end=20.0, record_every=1),
    "relaxation_only": Scenario(
        name="relaxation_only", case=MAXWELLIAN,
        n_x=257, n_v=64, L_x=8.0, v_quadrature="gauss_hermite",
        init_kind="odd_mode", init_amplitude=0.1,
        dt=0.01, t_end=10.0, record_every=1, transport=False),
    "fast_diffusion_default": Scenario(
        name="fast_diffusion_default", case=FAST_DIFFUSION,
        beta=1.2, k=3.0, n_x=257, n_v=257, L_x=12.0, L_v=40.0,
        v_quadrature="uniform", init_kind="density_wave",
        init_amplitude=0.1, dt=0.01, t_end=10.0, record_every=5),
}


def list_presets() -> list:
    return sorted(_PRESETS)


def get_preset(name: str) -> Scenario:
    if name not in _PRESETS:
        raise ParseError(f"unknown preset {name!r}; have {list_presets()}")
    return replace(_PRESETS[name])


def _build(sc: Scenario):
    grid = make_grid(n_x=sc.n_x, n_v=sc.n_v, L_x=sc.L_x, L_v=sc.L_v,
                     v_quadrature=sc.v_quadrature)
    if sc.case == MAXWELLIAN:
        model = build_equilibrium(MAXWELLIAN, gaussian_potential(), grid=grid)
    else:
        model = build_equilibrium(FAST_DIFFUSION,
                                  fast_diffusion_potential(sc.beta),
                                  k=sc.k, grid=grid)
    return grid, model


def _initial_data(sc: Scenario, model, grid: PhaseGrid) -> np.ndarray:
    amp = sc.init_amplitude
    if sc.init_kind == "density_wave":
        f0 = model.F * (1.0 + amp * np.sin(np.pi * grid.x / grid.L_x))[:, None]
    elif sc.init_kind == "odd_mode":
        f0 = model.F * (1.0 + amp * grid.v[None, :])
    else:  # shifted_maxwellian: equilibrium profile displaced in v
        vs = grid.v[None, :] - amp
        if sc.case == MAXWELLIAN:
            prof = np.exp(-0.5 * vs ** 2 - model.V_x[:, None]) \
                / np.sqrt(2.0 * np.pi)
        else:
            prof = (0.5 * vs ** 2 + model.V_x[:, None]) ** (-(sc.k + 1.0))
        f0 = model.omega * prof if sc.case == FAST_DIFFUSION else prof
    mass = float(grid.w_x @ (f0 @ grid.w_v))
    return f0 / mass


def _constants_for(sc: Scenario, model, grid):
    """Spectral gap, hypothesis constants and the optimized ledger."""
    if sc.case == MAXWELLIAN:
        hyp = check_hypotheses(model, grid)
        Lambda = 0.99 * hyp.Lambda  # deflate: use a certified lower bound
        theta, c0, c1 = hyp.theta, hyp.c0, hyp.c1
    else:
        gp = spectrum.GapProblem(weight_num=model.rho_F, weight_grad=model.m_F)
        Lambda = 0.99 * spectrum.solve_gap(gp, grid).Lambda
        xs = np.linspace(-2.0 * grid.L_x, 2.0 * grid.L_x, 4 * grid.n_x - 3)
        dV, d2V = model.potential.dV(xs), model.potential.d2V(xs)
        best = max(((th, max(float(np.max(d2V - 0.5 * th * dV ** 2)), 1e-12))
                    for th in np.arange(0.1, 0.95, 0.1)),
                   key=lambda tc: (1 - tc[0]) / (2 + Lambda * tc[1]))
        theta, c0 = best
        c1 = float(np.max(np.abs(d2V) / (1.0 + np.abs(dV))))
    c4 = hypo.estimate_c4(model, grid, num_samples=32, seed=sc.seed)
    if sc.eps is None or sc.a is None:
        eps, _, a = hypo.optimize_epsilon(Lambda, c4, a=sc.a)
        if sc.eps is not None:
            eps = sc.eps
    else:
        eps, a = sc.eps, sc.a
    return hypo.constants_ledger(Lambda, theta, c0, c1, c4, a, eps)


def _write_trajectory(path: Path, traj, with_mass: bool = True) -> None:
    cols = ["t", "norm2", "pi_norm2", "perp_norm2", "H", "D_total",
            "D1", "D2", "D3", "D4", "D5", "gronwall_slack", "mass"]
    with open(path, "w") as fh:
        fh.write(CSV_HEADER + "\n")
        fh.write(",".join(cols) + "\n")
        for rep, m in zip(traj.reports, traj.mass):
            row = [rep.t, rep.norm2, rep.pi_norm2, rep.perp_norm2, rep.H,
                   rep.D_total, *rep.D_terms, rep.gronwall_slack, m]
            fh.write(",".join(f"{v:.12e}" for v in row) + "\n")


def run_scenario(sc: Scenario, out_dir: Path) -> int:
    """Run one scenario, write artifacts, return the exit code."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    grid, model = _build(sc)
    ledger = _constants_for(sc, model, grid)
    f0 = _initial_data(sc, model, grid)
    traj = evolve.run(f0, sc.t_end, sc.dt, sc.record_every, model, grid,
                      ledger.eps, transport_enabled=sc.transport)

    checks = {}
    if sc.transport:
        ok, worst = hypo.check_gronwall(traj.reports, ledger.lam)
        checks["gronwall"] = (ok, f"max D + lambda H = {worst:.3e}")
    n2 = traj.norm2
    drift = float(np.max(np.abs(traj.mass - 1.0)))
    checks["mass"] = (drift <= 1e-10, f"max |mass - 1| = {drift:.3e}")
    mono = float(np.max(np.diff(n2))) if n2.size > 1 else 0.0
    checks["monotone_norm"] = (mono <= 1e-12 * n2[0],
                               f"max norm2 increment = {mono:.3e}")
    try:
        rate, r2 = hypo.fit_decay_rate(traj.times, n2)
        target = 2.0 if not sc.transport else ledger.lam
        checks["decay_rate"] = (
            rate >= target * (1.0 - 1e-3) and ledger.feasible,
            f"fitted rate {rate:.4f} (r^2 = {r2:.4f}), certified {target:.4f}")
    except HypokineticError as exc:
        checks["decay_rate"] = (False, f"fit failed: {exc}")

    (out_dir / "constants.txt").write_text(
        "\n".join(ledger.lines()) + "\n")
    _write_trajectory(out_dir / "trajectory.csv", traj)
    lines = [f"scenario: {sc.name}", f"case: {sc.case}",
             f"steps: {int(round(sc.t_end / sc.dt))}  dt: {sc.dt}", ""]
    all_ok = True
    for name, (ok, detail) in checks.items():
        lines.append(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
        all_ok = all_ok and ok
    (out_dir / "report.txt").write_text("\n".join(lines) + "\n")
    print("\n".join(lines))
    return 0 if all_ok else 1


def main(argv=None) -> int:
    p = argparse.ArgumentParser(
        prog="hypokinetic",
        description="Kinetic relaxation runs with certified decay rates.")
    sub = p.add_subparsers(dest="cmd", required=True)

    pr = sub.add_parser("run", help="run a scenario file or preset")
    pr.add_argument("scenario", nargs="+",
                    help="scenario file path or preset name")
    pr.add_argument("--batch", action="store_true",
                    help="run all arguments, worst exit code wins")
    pr.add_argument("--seed", type=int, default=None)
    pr.add_argument("--out", type=Path, default=Path("out"))

    sub.add_parser("presets", help="list bundled scenarios")

    pc = sub.add_parser("check", help="validate a scenario file")
    pc.add_argument("scenario")

    args = p.parse_args(argv)
    try:
        if args.cmd == "presets":
            for name in list_presets():
                print(name)
            return 0
        if args.cmd == "check":
            sc = _load(args.scenario)
            print(f"ok: {sc.name} ({sc.case})")
            return 0
        names = args.scenario
        if len(names) > 1 and not args.batch:
            raise ParseError("multiple scenarios require --batch")
        worst = 0
        for name in names:
            sc = _load(name)
            if args.seed is not None:
                sc.seed = args.seed
            code = run_scenario(sc, Path(args.out) / sc.name)
            worst = max(worst, code)
        return worst
    except HypokineticError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _load(name: str) -> Scenario:
    if name in _PRESETS:
        return get_preset(name)
    path = Path(name)
    if not path.exists():
        raise ParseError(f"no such scenario file or preset: {name}")
    return parse_scenario(path.read_text())


if __name__ == "__main__":
    sys.exit(main())
