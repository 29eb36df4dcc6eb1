"""Numerical laboratory for linear kinetic relaxation dynamics.

The package evolves distributions f(x, v) under free or confined
transport coupled to projection-type relaxation towards a global
equilibrium F, and certifies exponential convergence through a modified
entropy with fully explicit constants.
"""

from .errors import (CFLViolation, DegenerateWindow, HypokineticError,
                     HypothesisFailed, Infeasible, InvalidExponent, NoGap,
                     NonFinite, NonIntegrable, ParseError, SingularSystem,
                     ValidationError)
from .grid import (PhaseGrid, density, flux, inner_mu, make_grid, norm_mu,
                   second_moment)
from .model import (EquilibriumModel, HypothesisReport, Potential,
                    build_equilibrium, check_hypotheses,
                    fast_diffusion_potential, gaussian_potential,
                    power_potential)
from .ops import (EllipticOperator, apply_A, apply_A_star, apply_L, apply_Pi,
                  apply_T, apply_TA, dual_norm_AT_perp, operator_kit,
                  recenter, solve_elliptic)
from .spectrum import (GapProblem, GapResult, hardy_poincare_constant,
                       improved_poincare_check, poincare_constant, solve_gap,
                       weighted_hardy_check)
from .hypo import (ConstantsLedger, HypoReport, check_gronwall,
                   check_operator_estimate, constants_ledger, dissipation_D,
                   estimate_c4, fit_decay_rate, lyapunov_H, optimize_epsilon)
from .evolve import (Trajectory, cfl_limit, relax_step, run, step_strang,
                     transport_step)
from .cli import Scenario, get_preset, list_presets, parse_scenario, run_scenario

__version__ = "0.1.0"
