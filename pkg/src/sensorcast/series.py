"""Immutable time series container and the operations every other layer builds on.

A :class:`TimeSeries` pairs a strictly increasing timestamp vector with a
value vector and carries the sensor's reporting resolution.  All operations
here are pure: they never mutate their inputs and return new objects, so
series can be shared freely across threads and worker processes.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

__all__ = [
    "TimeSeries",
    "Split",
    "interpolate_gaps",
    "add_white_noise",
    "quantize_to_resolution",
    "extract_splits",
    "gap_fill",
]


def _as_readonly_f64(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=np.float64, copy=True)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """A regular or irregular scalar series from a single sensor.

    Parameters
    ----------
    timestamps : ndarray
        Seconds, strictly increasing, same length as ``values``.
    values : ndarray
        Measured values as float64.
    unit : str
        Physical unit label, informational only.
    resolution : float
        Smallest meaningful value step of the producing sensor; must be
        positive.  Doubles as the default transmission threshold.
    """

    timestamps: np.ndarray
    values: np.ndarray
    unit: str = ""
    resolution: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "timestamps", _as_readonly_f64(self.timestamps, "timestamps"))
        object.__setattr__(self, "values", _as_readonly_f64(self.values, "values"))
        if self.timestamps.shape != self.values.shape:
            raise ValueError(
                f"timestamps and values must match: {len(self.timestamps)} != {len(self.values)}"
            )
        if len(self.timestamps) == 0:
            raise ValueError("series must contain at least one sample")
        if not np.all(np.isfinite(self.timestamps)):
            raise ValueError("timestamps must be finite")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("values must be finite")
        if len(self.timestamps) > 1 and not np.all(np.diff(self.timestamps) > 0):
            raise ValueError("timestamps must be strictly increasing")
        if not (self.resolution > 0):
            raise ValueError(f"resolution must be positive, got {self.resolution}")

    def __len__(self) -> int:
        return len(self.values)

    @staticmethod
    def regular(values, period: float = 1.0, t0: float = 0.0, *, unit: str = "",
                resolution: float = 1.0) -> "TimeSeries":
        """Build a series sampled every ``period`` seconds starting at ``t0``."""
        values = np.asarray(values, dtype=np.float64)
        ts = t0 + period * np.arange(len(values), dtype=np.float64)
        return TimeSeries(ts, values, unit=unit, resolution=resolution)

    def with_values(self, values) -> "TimeSeries":
        """Same timestamps and metadata, new values."""
        return replace(self, values=_as_readonly_f64(values, "values"))

    def slice(self, start: int, stop: int) -> "TimeSeries":
        """Contiguous sub-series by sample index."""
        if not (0 <= start < stop <= len(self)):
            raise ValueError(f"bad slice [{start}, {stop}) for series of length {len(self)}")
        return replace(self, timestamps=self.timestamps[start:stop], values=self.values[start:stop])


@dataclass(frozen=True, eq=False)
class Split:
    """One rolling-origin evaluation split.

    ``history`` is the model-fitting segment, ``window`` the segment being
    forecast; the window starts immediately after the history in the source
    series and ``origin`` is the index of the first history sample.
    """

    history: np.ndarray
    window: np.ndarray
    origin: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "history", _as_readonly_f64(self.history, "history"))
        object.__setattr__(self, "window", _as_readonly_f64(self.window, "window"))
        if len(self.history) < 1:
            raise ValueError("split history must be non-empty")
        if len(self.window) < 1:
            raise ValueError("split window must be non-empty")
        if self.origin < 0:
            raise ValueError(f"origin must be >= 0, got {self.origin}")


def interpolate_gaps(series: TimeSeries, expected_period: float) -> TimeSeries:
    """Resample onto the regular grid ``t0 + k * expected_period``.

    Values at grid points are linear interpolations of the neighbouring
    observed samples; grid points beyond the last observation are not
    generated.  Needs at least two samples.
    """
    if expected_period <= 0:
        raise ValueError(f"expected_period must be positive, got {expected_period}")
    if len(series) < 2:
        raise ValueError("interpolation needs at least two samples")
    t0 = series.timestamps[0]
    span = series.timestamps[-1] - t0
    n_steps = int(np.floor(span / expected_period + 1e-9))
    grid = t0 + expected_period * np.arange(n_steps + 1, dtype=np.float64)
    vals = np.interp(grid, series.timestamps, series.values)
    return TimeSeries(grid, vals, unit=series.unit, resolution=series.resolution)


def add_white_noise(series: TimeSeries, sigma: float, seed: int) -> TimeSeries:
    """Add iid N(0, sigma^2) noise; the draw is fully determined by ``seed``."""
    if sigma < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    if sigma == 0:
        return series
    rng = np.random.default_rng(seed)
    noisy = series.values + sigma * rng.standard_normal(len(series))
    return series.with_values(noisy)


def _round_half_away(x: np.ndarray) -> np.ndarray:
    # np.round is banker's rounding; the quantizer needs ties away from zero.
    return np.copysign(np.floor(np.abs(x) + 0.5), x)


def quantize_to_resolution(series: TimeSeries, resolution: float) -> TimeSeries:
    """Snap every value to the nearest multiple of ``resolution``.

    Ties round away from zero.  The result's ``resolution`` field is set to
    the new step so downstream thresholds follow the simulated sensor.
    """
    if resolution <= 0:
        raise ValueError(f"resolution must be positive, got {resolution}")
    q = _round_half_away(series.values / resolution) * resolution
    return replace(series, values=_as_readonly_f64(q, "values"), resolution=resolution)


def extract_splits(series: TimeSeries, history_len: int, window_len: int,
                   n_splits: int, seed: int) -> list[Split]:
    """Draw ``n_splits`` rolling-origin splits with fixed segment lengths.

    Origins are uniform over every feasible start index, drawn without
    replacement while enough distinct origins exist and with replacement
    otherwise.  The draw is fully determined by ``seed``.
    """
    if history_len < 1 or window_len < 1:
        raise ValueError("history_len and window_len must be >= 1")
    if n_splits < 1:
        raise ValueError("n_splits must be >= 1")
    need = history_len + window_len
    if len(series) < need:
        raise ValueError(
            f"series of length {len(series)} too short for history {history_len} "
            f"+ window {window_len}"
        )
    n_origins = len(series) - need + 1
    rng = np.random.default_rng(seed)
    origins = rng.choice(n_origins, size=n_splits, replace=n_origins < n_splits)
    out = []
    for o in origins:
        o = int(o)
        out.append(Split(
            history=series.values[o:o + history_len],
            window=series.values[o + history_len:o + need],
            origin=o,
        ))
    return out


def gap_fill(series: TimeSeries, expected_period: float, *, sigma: float | None = None,
             seed: int = 0, noise_scope: str = "filled") -> TimeSeries:
    """Interpolate onto the regular grid, then perturb the filled samples.

    ``noise_scope`` selects which samples receive noise: ``"filled"`` (only
    grid points that had no original observation), ``"all"``, or ``"none"``.
    ``sigma`` defaults to the series resolution.
    """
    if noise_scope not in ("filled", "all", "none"):
        raise ValueError(f"noise_scope must be 'filled', 'all' or 'none', got {noise_scope!r}")
    regular = interpolate_gaps(series, expected_period)
    if noise_scope == "none":
        return regular
    if sigma is None:
        sigma = series.resolution
    if sigma == 0:
        return regular
    if noise_scope == "all":
        return add_white_noise(regular, sigma, seed)
    # A grid point counts as observed when an original timestamp lands on it.
    tol = 1e-6 * expected_period
    idx = np.searchsorted(series.timestamps, regular.timestamps)
    idx_lo = np.clip(idx - 1, 0, len(series) - 1)
    idx_hi = np.clip(idx, 0, len(series) - 1)
    near = np.minimum(
        np.abs(series.timestamps[idx_lo] - regular.timestamps),
        np.abs(series.timestamps[idx_hi] - regular.timestamps),
    )
    filled = near > tol
    rng = np.random.default_rng(seed)
    noise = sigma * rng.standard_normal(len(regular))
    vals = regular.values.copy()
    vals[filled] += noise[filled]
    return regular.with_values(vals)
