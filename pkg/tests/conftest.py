from __future__ import annotations

import numpy as np
import pytest

from sensorcast.series import TimeSeries


def make_ar1(phi: float, n: int, seed: int, sigma: float = 1.0) -> np.ndarray:
    """Stationary AR(1) draw: x_t = phi x_{t-1} + e_t, x_0 from the
    stationary distribution."""
    rng = np.random.default_rng(seed)
    x = np.empty(n)
    x[0] = rng.standard_normal() * sigma / np.sqrt(1.0 - phi * phi)
    e = sigma * rng.standard_normal(n)
    for t in range(1, n):
        x[t] = phi * x[t - 1] + e[t]
    return x


def yule_walker_ar1(x: np.ndarray) -> float:
    """Lag-1 autocorrelation estimate of the AR(1) coefficient."""
    z = x - np.mean(x)
    return float(np.dot(z[1:], z[:-1]) / np.dot(z, z))


@pytest.fixture
def rng():
    return np.random.default_rng(2026)


@pytest.fixture
def short_series():
    return TimeSeries.regular([1.0, 2.0, 4.0, 8.0, 16.0], period=1.0)
