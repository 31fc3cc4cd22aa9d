"""Bregman forward-backward splitting with separable entropies.

Solves ``min_x sum_i phi_i(x_i) + psi(L x)`` by iterating a Bregman prox
of ``phi`` against a gradient step on ``psi o L``, with the geometry set by a
separable Legendre function ``f`` satisfying ``f >= beta psi o L``.
"""

from .errors import (BracketError, BregFBError, ConvergenceError, DimensionError,
                     DomainError, ProblemFileError, ScheduleError)
from .legendre import KINDS, LegendreFunction, ScalarLegendre
from .multiblock import (MultiBlockProblem, block_step, build_is_regression,
                         build_kl_regression, default_constants, flatten, mb_solve,
                         subadditivity_check)
from .oracle import Box, grid_refine_minimize, prox_residual
from .phi import PHI_KINDS, ScalarPhi, make_phi, parse_phi
from .problem_file import load_problem, parse_problem
from .prox import (ProxOperator, lookup_closed_form, prox_apply, prox_closed_form_table,
                   prox_numeric_scalar, prox_scalar)
from .scalar import Bracket, lambert_w0, lambert_w0_exp, solve_monotone_scalar
from .solver import (BregmanFidelity, CompositeProblem, IterateTrace, SolveReport,
                     StepSchedule, StopReason, check_relative_smoothness,
                     check_trace_inequalities, forward_backward_step, objective,
                     read_trace_csv, solve, validate_schedule)

__version__ = "0.1.0"
