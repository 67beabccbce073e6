from __future__ import annotations

import numpy as np
import pytest

from sensorcast.forecast.models import FitConfig, FitError, MethodKind
from sensorcast.forecast.selection import fit_model, min_history, select_model

from conftest import make_ar1


def test_min_history_per_method():
    assert min_history(FitConfig(method="constant")) == 1
    assert min_history(FitConfig(method="simple_mean")) == 1
    assert min_history(FitConfig(method="linear")) == 2
    assert min_history(FitConfig(method="exponential_smoothing")) == 4
    assert min_history(FitConfig(method="arima")) == 12
    assert min_history(FitConfig(method="arima", order_grid=((1, 0, 0),))) == 11


def test_fit_model_dispatches_every_method():
    history = make_ar1(0.5, 60, seed=1)
    for name, kind in (
        ("constant", MethodKind.CONSTANT),
        ("linear", MethodKind.LINEAR),
        ("simple_mean", MethodKind.SIMPLE_MEAN),
        ("exponential_smoothing", MethodKind.EXPONENTIAL_SMOOTHING),
        ("arima", MethodKind.ARIMA),
    ):
        model = fit_model(history, FitConfig(method=name))
        assert model.kind is kind
        assert model.fit_n == 60


def test_fit_model_respects_method_minimums():
    with pytest.raises(FitError):
        fit_model(np.array([1.0]), FitConfig(method="linear"))
    with pytest.raises(FitError):
        fit_model(np.arange(3.0), FitConfig(method="exponential_smoothing"))
    with pytest.raises(FitError):
        fit_model(np.arange(5.0), FitConfig(method="arima"))


def test_select_model_prefers_the_matching_process():
    # Mean-reverting noise around a level: the mean beats value-holding.
    rng = np.random.default_rng(3)
    flat = 20.0 + 0.5 * rng.standard_normal(200)
    chosen = select_model(flat, [FitConfig(method="constant"),
                                 FitConfig(method="simple_mean")])
    assert chosen.kind is MethodKind.SIMPLE_MEAN

    # Persistent random walk: value-holding beats the global mean.
    walk = np.cumsum(rng.standard_normal(200))
    chosen = select_model(walk, [FitConfig(method="constant"),
                                 FitConfig(method="simple_mean")])
    assert chosen.kind is MethodKind.CONSTANT


def test_select_model_skips_unfittable_candidates():
    short = np.array([1.0, 2.0, 3.0, 2.5])
    chosen = select_model(short, [FitConfig(method="arima"),
                                  FitConfig(method="constant")])
    assert chosen.kind is MethodKind.CONSTANT


def test_select_model_all_skipped_raises():
    with pytest.raises(FitError):
        select_model(np.array([1.0, 2.0]), [FitConfig(method="arima"),
                                            FitConfig(method="exponential_smoothing")])
    with pytest.raises(ValueError):
        select_model(np.arange(10.0), [])


def test_select_model_tie_breaks_toward_first_candidate():
    # Constant and simple-mean coincide on a flat line; equal AICc and equal k
    # fall back to candidate order.
    flat = np.full(30, 7.0)
    chosen = select_model(flat, [FitConfig(method="constant"),
                                 FitConfig(method="simple_mean")])
    assert chosen.kind is MethodKind.CONSTANT
    chosen = select_model(flat, [FitConfig(method="simple_mean"),
                                 FitConfig(method="constant")])
    assert chosen.kind is MethodKind.SIMPLE_MEAN
