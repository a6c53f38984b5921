"""Mean-oscillation functionals of BV functions and their small-scale limits."""

from bmotv.bvfun import (
    Analytic,
    Analytic2D,
    CantorComponent,
    Domain,
    Interpolant,
    Jump,
    Mollified,
    Region2D,
    Sampled,
    SmoothPiece,
    evaluate,
    load_model,
    model_from_dict,
    model_to_dict,
    tv_decomposition,
)
from bmotv.kernels import BACKEND
from bmotv.limits import EpsSchedule, Family, gamma_experiment, sweep, targets
from bmotv.osc import Cube, mean_oscillation, mean_oscillation_2d
from bmotv.packing import PackingParams, kappa, kappa_1d, kappa_2d
from bmotv.recovery import check_mollifier_monotonicity, mollify, sbv_recovery_family, smooth_recovery_family

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Analytic",
    "Analytic2D",
    "CantorComponent",
    "Cube",
    "Domain",
    "EpsSchedule",
    "Family",
    "Interpolant",
    "Jump",
    "Mollified",
    "PackingParams",
    "Region2D",
    "Sampled",
    "SmoothPiece",
    "check_mollifier_monotonicity",
    "evaluate",
    "gamma_experiment",
    "kappa",
    "kappa_1d",
    "kappa_2d",
    "load_model",
    "mean_oscillation",
    "mean_oscillation_2d",
    "model_from_dict",
    "model_to_dict",
    "mollify",
    "sbv_recovery_family",
    "smooth_recovery_family",
    "sweep",
    "targets",
    "tv_decomposition",
]
