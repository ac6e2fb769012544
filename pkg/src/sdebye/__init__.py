"""Periodic Schrodinger-Debye system: split-step solver, Duhamel fixed points,
Bourgain-space norms, exponential-sum counting and well-posedness diagnostics."""
from .diagnostics import (
    apriori_exponents,
    balance_terms,
    classify_wellposedness,
    h1_balance_residual,
    integrated_balance_residual,
    interpolation_check,
)
from .picard import NoContraction, duhamel_decompose, picard_solve
from .profiles import initial_profile
from .propagators import BlowUpError, ModelParams, SimState, Trajectory, evolve, strang_step
from .spacetime import SpaceTimeFunction, TimeWindow
from .strichartz import (
    ParaboloidSection,
    admissible_check,
    eisenstein_solution_count,
    exp_sum_lp_norm,
    growth_fit,
    kp_lower_bound,
    representation_counts,
)
from .torus import Field, Spectrum, TorusGrid, forward, inverse, make_grid
from .xsb import cutoff_scaling_ratio, l4_embedding_ratio, triple_norm, xsb_norm

__version__ = "0.1.0"
