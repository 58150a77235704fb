"""Touchdown solutions and pull-in voltage for radial electrostatic MEMS problems."""
from .asymptotics import AsymptoticConstants, compute_constants, expansion_eval, fit_asymptotics
from .models import (CustomGap, DirectSource, MemsPower, MonomialSum, PowerMonomial, Problem,
                     SphereCap, VariableExponent, WeightedPower, default_majorant, phi_eval,
                     phi_inverse, source_cumulative, validate_hypotheses)
from .pullin import bisect_pullin, branch_sweep, lower_bound, refinement_trend, upper_bound
from .quadrature import cumulative_integral, graded_grid, tail_integral
from .shooter import ShooterConfig, reconstruct_touchdown, shoot_backward
from .solver import (build_small_lambda_supersolution, picard_step, residual,
                     solve_from_subsolution, solve_from_supersolution)

__version__ = "0.1.0"
