"""Truncation-error bounds for sampling expansions of bandlimited phi-sub-Gaussian processes."""

__version__ = "0.1.0"

from .errors import (ComputationError, DivergenceError, DomainError, GateError,
                     InputError, ResolutionError, UnsatisfiableError, WKSError)
from .kernel import SamplingConfig, sinc_weight, truncated_sum
from .lp_approx import ProcessSpec, certify_lp, min_terms_lp, s_np, tail_bound_lp
from .ms_bounds import SpectralMeasure, b_n, belyaev_bound, c_n, exact_ms_error
from .orlicz import (OrliczFunction, check_condition_q, conjugate, make_gaussian,
                     make_power, make_weibull_piecewise, parse_family)
from .uniform_approx import certify_uniform, min_terms_uniform, uniform_tail_wks
