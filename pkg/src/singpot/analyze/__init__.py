"""Regularity diagnostics for solved fields."""
from ._fields import AnalysisError
from .decay import ExponentFit, fit_decay_exponent, linear_fit, windowed_slopes
from .holder import HolderEstimate, estimate_holder
from .kernel import KernelWeightFit, fit_kernel_weight
from .meanvalue import MeanValueReport, check_mean_value, mean_value_weight
from .principles import PrincipleReport, check_comparison, check_max_principle, sub_ball
from .report import CheckRecord, RunReport

__all__ = [
    "AnalysisError",
    "CheckRecord",
    "ExponentFit",
    "HolderEstimate",
    "KernelWeightFit",
    "MeanValueReport",
    "PrincipleReport",
    "RunReport",
    "check_comparison",
    "check_max_principle",
    "check_mean_value",
    "estimate_holder",
    "fit_decay_exponent",
    "fit_kernel_weight",
    "linear_fit",
    "mean_value_weight",
    "sub_ball",
    "windowed_slopes",
]
