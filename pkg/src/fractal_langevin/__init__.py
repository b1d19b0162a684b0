"""Calculus on fractal curves and Levy-driven Langevin motion along them."""

__version__ = "0.1.0"

from .curve import CurveSpec, FractalCurve, build_ifs, build_koch, build_line, evaluate
from .fcalculus import (
    MassEstimate,
    StaircaseTable,
    build_staircase,
    conjugacy_apply,
    falpha_derivative,
    falpha_integral,
    fractal_fourier,
    fractal_fourier_inverse,
    inverse_staircase,
    mass,
    on_points,
    staircase_eval,
    wrap_mass,
)
from .noise import (
    NoiseModel,
    empirical_char_function,
    renormalize_cutoff,
    sample_power_law,
    sample_stable_increment,
    stream,
)
from .langevin import Ensemble, RunConfig, alpha_velocity, map_to_curve, simulate_ensemble, step
from .analysis import (
    DensityCurve,
    FitReport,
    analytic_char_function,
    analytic_density,
    ecf_distance,
    empirical_density,
    fractional_moment_scaling,
    ks_gaussian_test,
)
