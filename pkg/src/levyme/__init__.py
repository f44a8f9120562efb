"""Closed-form fluctuation laws of Levy processes with matrix-exponential
jumps, plus an independent Monte Carlo oracle to validate them.

The model is a drift plus optional Brownian part plus finite-intensity
two-sided jumps; at least one jump side must be matrix-exponential (a
rational transform), the other may be given by an arbitrary tail
transform. Everything downstream of the root solver is closed-form:
killed extrema laws, overshoot laws over a level, occupation-time
transforms and ladder exponents.
"""
from .errors import (LevyMEError, NumericsError, PreconditionError,
                     ValidationError)
from .factorization import (ExtremumLaw, FactorizationComponent,
                            absolute_extremum, absolute_supremum,
                            build_component, extremum_law, infimum_law,
                            limit_minus_quantities, matrix_tail_transform,
                            supremum_law, wiener_hopf_residual)
from .model import (GeneralJumpSpec, LevyModel, MEJumpSpec, build_me_jump,
                    classify_and_mean)
from .occupation import (hyperexp_occupation, ladder_exponent,
                         occupation_identity_residual, occupation_limit,
                         occupation_mgf, occupation_profile, occupation_zero)
from .overshoot import (OvershootLaw, discounted_overshoot, overshoot_limit,
                        triple_law_density)
from .presets import PRESET_NAMES, preset
from .roots import LimitRoots, RootSet, limiting_roots, solve_roots
from .simulate import (FunctionalRequest, SimConfig, SimResult,
                       sample_jump, simulate, simulate_killed_path)

__version__ = "1.0.0"

__all__ = [
    "LevyMEError", "ValidationError", "PreconditionError", "NumericsError",
    "LevyModel", "MEJumpSpec", "GeneralJumpSpec", "build_me_jump",
    "classify_and_mean",
    "RootSet", "LimitRoots", "solve_roots", "limiting_roots",
    "FactorizationComponent", "ExtremumLaw", "build_component",
    "matrix_tail_transform", "extremum_law", "supremum_law", "infimum_law",
    "absolute_supremum", "absolute_extremum", "limit_minus_quantities",
    "wiener_hopf_residual",
    "OvershootLaw", "discounted_overshoot", "overshoot_limit",
    "triple_law_density",
    "occupation_mgf", "occupation_zero", "occupation_profile",
    "occupation_limit", "hyperexp_occupation", "ladder_exponent",
    "occupation_identity_residual",
    "SimConfig", "SimResult", "FunctionalRequest", "simulate",
    "simulate_killed_path", "sample_jump",
    "preset", "PRESET_NAMES",
    "__version__",
]
