"""Forecasting engine: five model families behind one model container."""

from .arima import (
    ROOT_MARGIN,
    choose_differencing,
    css_residuals,
    fit_arima,
    hannan_rissanen_start,
)
from .models import (
    FULL_ORDER_GRID,
    FitConfig,
    FitError,
    ForecastModel,
    MethodKind,
    aicc,
    fit_constant,
    fit_linear,
    fit_simple_mean,
    forecast,
    gaussian_neg2_loglik,
)
from .optimize import SimplexResult, golden_section, nelder_mead
from .selection import fit_model, min_history, select_model
from .smoothing import fit_exponential_smoothing, simple_errors, trend_errors

__all__ = [
    "ROOT_MARGIN",
    "FULL_ORDER_GRID",
    "FitConfig",
    "FitError",
    "ForecastModel",
    "MethodKind",
    "SimplexResult",
    "aicc",
    "choose_differencing",
    "css_residuals",
    "fit_arima",
    "fit_constant",
    "fit_exponential_smoothing",
    "fit_linear",
    "fit_model",
    "fit_simple_mean",
    "forecast",
    "gaussian_neg2_loglik",
    "golden_section",
    "hannan_rissanen_start",
    "min_history",
    "nelder_mead",
    "select_model",
    "simple_errors",
    "trend_errors",
]
