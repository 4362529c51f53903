"""Certified bounds for the supremum of random walks with truncated heavy-tailed steps."""

from . import bounds, dist, lundberg, montecarlo, reinsure, taylor
from .bounds import (Theorem1Certificate, Theorem2Certificate, mgf_upper_bound_thm1,
                     mgf_upper_bound_thm2, theorem1_bound, theorem1_bound_all_y,
                     theorem1_bound_sharper, theorem1_certificate, theorem2_bound,
                     theorem2_certificate)
from .dist import (DistributionSpec, Family, MomentSet, custom_table, lognormal_type_shift,
                   pareto_shift, stream, weibull_shift)
from .errors import *  # noqa: F401,F403
from .lundberg import TruncatedWalkModel, cl_bound, gamma, truncated_mgf
from .montecarlo import MCEstimate, estimate_sup_tail, estimate_sup_tail_grid
from .reinsure import (RuinModel, asymptotic_slope_check, estimate_constant_C,
                       finite_horizon_ruin_mc, ruin_model, ruin_prob_mc,
                       upper_bound_decomposition)
from .taylor import TaylorConstants, figure_tables, me_delta, mg_delta, taylor_constants

__version__ = "0.1.0"
