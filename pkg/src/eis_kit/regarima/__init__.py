"""Time-series engine: ACF-driven order selection and regression with
ARMA-structured errors for predicting sweat glucose from impedance tracks."""

from .acf import AcfResult, acf, select_order, significant_initial_lags
from .interpolate import interpolate_reference
from .model import (
    FitConfig,
    PredictionResult,
    RegArimaModel,
    difference,
    fit,
    fit_series,
    integrate,
    model_from_json,
    model_to_json,
    predict,
    residual_histogram,
    significance_filter,
)
from .series import DEFAULT_PREDICTORS, PREDICTOR_NAMES, SubjectSeries

__all__ = [
    "AcfResult",
    "acf",
    "select_order",
    "significant_initial_lags",
    "interpolate_reference",
    "FitConfig",
    "PredictionResult",
    "RegArimaModel",
    "difference",
    "integrate",
    "fit",
    "fit_series",
    "predict",
    "residual_histogram",
    "significance_filter",
    "model_to_json",
    "model_from_json",
    "DEFAULT_PREDICTORS",
    "PREDICTOR_NAMES",
    "SubjectSeries",
]
