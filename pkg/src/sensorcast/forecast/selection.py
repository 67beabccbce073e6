"""Fit dispatch and cross-method model selection."""

from __future__ import annotations

import numpy as np

from .arima import fit_arima
from .models import (
    FitConfig,
    FitError,
    ForecastModel,
    MethodKind,
    aicc,
    fit_constant,
    fit_linear,
    fit_simple_mean,
    gaussian_neg2_loglik,
)
from .smoothing import fit_exponential_smoothing

__all__ = ["fit_model", "select_model", "min_history"]


def min_history(config: FitConfig) -> int:
    """Shortest history the configured method can be fitted on."""
    kind = config.method
    if kind is MethodKind.CONSTANT or kind is MethodKind.SIMPLE_MEAN:
        return 1
    if kind is MethodKind.LINEAR:
        return 2
    if kind is MethodKind.EXPONENTIAL_SMOOTHING:
        return 4
    return 10 + max(max(p, d, q) for p, d, q in config.order_grid)


def fit_model(history: np.ndarray, config: FitConfig) -> ForecastModel:
    """Fit the configured method on the history."""
    kind = config.method
    if kind is MethodKind.CONSTANT:
        return fit_constant(history)
    if kind is MethodKind.LINEAR:
        return fit_linear(history)
    if kind is MethodKind.SIMPLE_MEAN:
        return fit_simple_mean(history)
    if kind is MethodKind.EXPONENTIAL_SMOOTHING:
        return fit_exponential_smoothing(history, config)
    if kind is MethodKind.ARIMA:
        return fit_arima(history, config)
    raise ValueError(f"unknown method {kind!r}")


def _one_step_neg2_loglik(model: ForecastModel, history: np.ndarray) -> tuple[float, int]:
    """In-sample one-step-ahead Gaussian -2 log L for ranking a fit.

    The smoothing and ARIMA fitters already carry their in-sample errors;
    the closed-form methods get the natural one-step predictor: previous
    value, previous line extension, expanding mean.
    """
    if np.isfinite(model.neg2_loglik) and model.loglik_n > 0:
        return model.neg2_loglik, model.loglik_n
    kind = model.kind
    if kind is MethodKind.CONSTANT:
        errors = np.diff(history)
    elif kind is MethodKind.LINEAR:
        preds = history[1:-1] + (history[1:-1] - history[:-2])
        errors = history[2:] - preds
    elif kind is MethodKind.SIMPLE_MEAN:
        running = np.cumsum(history[:-1]) / np.arange(1, len(history))
        errors = history[1:] - running
    else:
        raise ValueError(f"no in-sample error rule for {kind!r}")
    if len(errors) == 0:
        raise FitError(f"history of length {len(history)} too short to rank {kind.value}")
    return gaussian_neg2_loglik(errors), len(errors)


def select_model(history: np.ndarray, candidates) -> ForecastModel:
    """Fit every candidate config and keep the lowest-AICc model.

    Ties break toward fewer parameters, then earlier candidate position.
    Candidates that cannot be fitted or whose AICc is undefined are skipped;
    if that removes all of them a :class:`FitError` is raised.
    """
    history = np.asarray(history, dtype=np.float64)
    candidates = list(candidates)
    if not candidates:
        raise ValueError("need at least one candidate config")
    best = None
    for idx, config in enumerate(candidates):
        try:
            model = fit_model(history, config)
            neg2ll, n = _one_step_neg2_loglik(model, history)
            crit = aicc(neg2ll, model.k, n)
        except (FitError, ValueError):
            continue
        key = (crit, model.k, idx)
        if best is None or key < best[0]:
            best = (key, model)
    if best is None:
        raise FitError(
            f"no candidate could be fitted and ranked on a history of length {len(history)}"
        )
    return best[1]
