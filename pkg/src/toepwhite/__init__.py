"""Toeplitz covariance estimation and whitened GLRT source detection."""

from .toeplitz import (
    CovarianceSequence,
    NotPositiveSemidefinite,
    build_toeplitz,
    fourier_vector,
    hermitian_sqrt,
    regularized_hermitian_inverse,
    spectral_norm,
    symbol_eval,
    symbol_sup_norm,
    unbias_weights,
)
from .model import NoiseModel, ObservationMatrix, SourceModel, ar1_sequence, observe
from .estimators import EstimatorKind, AutocovarianceEstimate, estimate_covariance
from .detector import DetectionConfig, DetectionResult, Mode, glrt_statistic

__all__ = [
    "CovarianceSequence",
    "NotPositiveSemidefinite",
    "build_toeplitz",
    "fourier_vector",
    "hermitian_sqrt",
    "regularized_hermitian_inverse",
    "spectral_norm",
    "symbol_eval",
    "symbol_sup_norm",
    "unbias_weights",
    "NoiseModel",
    "ObservationMatrix",
    "SourceModel",
    "ar1_sequence",
    "observe",
    "EstimatorKind",
    "AutocovarianceEstimate",
    "estimate_covariance",
    "DetectionConfig",
    "DetectionResult",
    "Mode",
    "glrt_statistic",
]

__version__ = "0.1.0"
