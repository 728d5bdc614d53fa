"""Equivalent kernels of penalized spline smoothers."""
from .asymptotics import (bias_constant, interior_interval, optimal_bandwidth, predict,
                          predict_bias, predict_variance)
from .bandwidth import BandwidthInfo, bandwidth_h, k_index, lambda_for
from .drbasis import DRBasis, build_dr_basis, dr_orthonormality_residuals
from .errors import (DegenerateConfigurationError, InvalidArgumentError, SplineKernError,
                     UnsupportedConfigurationError)
from .estimator import Dataset, FitResult, effective_kernel_row, fit, gcv, select_model
from .kernel import (KernelModel, SmoothingKernelModel, build_kernel_model, eval_K_scaled, eval_W,
                     kernel_model_for_kq, kernel_rs, kernel_ss, smoothing_limit_model)
from .splines import SplineConfig, bspline, design_matrix
from .study import ExperimentSpec, StudyResult, run_study

__version__ = "0.1.0"

__all__ = [
    "BandwidthInfo", "DRBasis", "Dataset", "DegenerateConfigurationError", "ExperimentSpec",
    "FitResult", "InvalidArgumentError", "KernelModel", "SmoothingKernelModel", "SplineConfig",
    "SplineKernError", "StudyResult", "UnsupportedConfigurationError", "bandwidth_h",
    "bias_constant", "bspline", "build_dr_basis", "build_kernel_model", "design_matrix",
    "dr_orthonormality_residuals", "effective_kernel_row", "eval_K_scaled", "eval_W", "fit",
    "gcv", "interior_interval", "k_index", "kernel_model_for_kq", "kernel_rs", "kernel_ss",
    "lambda_for", "optimal_bandwidth", "predict", "predict_bias", "predict_variance", "run_study",
    "select_model", "smoothing_limit_model",
]
