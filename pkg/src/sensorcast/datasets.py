"""Dataset descriptors, built-in thresholds, CSV ingestion, and the bouncing
ball generator.

CSV schemas (header required, extra whitespace tolerated):

* indoor temperature (``intel`` family): ``epoch,moteid,temperature``;
  ``epoch`` is a monotone sample counter, converted to seconds by the
  descriptor's expected period.
* outdoor temperature (``sensorscope`` family): ``station,epoch,temperature``;
  same epoch convention.
* GPS track (``running_latitude`` / ``running_longitude``): ``timestamp,
  latitude,longitude``; timestamps are raw seconds and stay irregular, so
  no grid interpolation is applied on load.
* ball fixtures (``ball``): ``timestamp,position`` as written by the
  generator CLI.

Regular-cadence families are deduplicated (last write wins), sorted, and
gap-filled onto the expected grid with interpolation noise on the filled
points only.  Loading is deterministic: the noise seed derives from the
descriptor, never from ambient randomness.
"""

from __future__ import annotations

import csv
import enum
import zlib
from dataclasses import dataclass

import numpy as np

from .series import TimeSeries, gap_fill

__all__ = [
    "DatasetFamily",
    "DatasetDescriptor",
    "DataFormatError",
    "BallParams",
    "BALL_GROUPS",
    "builtin_threshold",
    "descriptor_for",
    "ball_signal",
    "ball_zero_crossings",
    "generate_ball",
    "ball_series",
    "load_csv",
    "write_series_csv",
]


class DataFormatError(ValueError):
    """Input file violates its declared schema."""


class DatasetFamily(enum.Enum):
    INTEL = "intel"
    SENSORSCOPE = "sensorscope"
    BALL = "ball"
    RUNNING_LATITUDE = "running_latitude"
    RUNNING_LONGITUDE = "running_longitude"

    @classmethod
    def coerce(cls, value) -> "DatasetFamily":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value))
        except ValueError:
            names = ", ".join(f.value for f in cls)
            raise ValueError(f"unknown dataset family {value!r}; expected one of: {names}") from None


# Reporting resolutions of the source sensors, doubling as transmission
# thresholds.  The outdoor stations digitize [-55, 130] degC at 12 bits.
_THRESHOLDS = {
    DatasetFamily.INTEL: 0.01,
    DatasetFamily.SENSORSCOPE: (130.0 - (-55.0)) / 2 ** 12,
    DatasetFamily.BALL: 0.001,
    DatasetFamily.RUNNING_LATITUDE: 8.38e-8,
    DatasetFamily.RUNNING_LONGITUDE: 8.38e-8,
}

_UNITS = {
    DatasetFamily.INTEL: "degC",
    DatasetFamily.SENSORSCOPE: "degC",
    DatasetFamily.BALL: "m",
    DatasetFamily.RUNNING_LATITUDE: "deg",
    DatasetFamily.RUNNING_LONGITUDE: "deg",
}

_PERIODS = {
    DatasetFamily.INTEL: 31.0,
    DatasetFamily.SENSORSCOPE: 30.0,
    DatasetFamily.BALL: 1.0,
    DatasetFamily.RUNNING_LATITUDE: None,
    DatasetFamily.RUNNING_LONGITUDE: None,
}


def builtin_threshold(family) -> float:
    """Default transmission threshold for a dataset family."""
    return _THRESHOLDS[DatasetFamily.coerce(family)]


@dataclass(frozen=True)
class DatasetDescriptor:
    """Identifies one sensor's series and how to ingest it."""

    family: DatasetFamily
    group: int = 1
    delta_min: float | None = None
    expected_period: float | None = None
    unit: str = ""
    sensor_id: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "family", DatasetFamily.coerce(self.family))
        if self.group < 1:
            raise ValueError(f"group must be >= 1, got {self.group}")

    @property
    def threshold(self) -> float:
        return self.delta_min if self.delta_min is not None else _THRESHOLDS[self.family]

    @property
    def period(self) -> float | None:
        return (self.expected_period if self.expected_period is not None
                else _PERIODS[self.family])

    @property
    def label(self) -> str:
        return f"{self.family.value}-g{self.group}"


def descriptor_for(family, group: int = 1, **overrides) -> DatasetDescriptor:
    """Descriptor with the family's built-in threshold, period, and unit."""
    family = DatasetFamily.coerce(family)
    fields = dict(unit=_UNITS[family])
    fields.update(overrides)
    return DatasetDescriptor(family=family, group=group, **fields)


@dataclass(frozen=True)
class BallParams:
    """Bouncing ball with decaying rebound height and unit measurement noise.

    The noiseless trajectory is ``amplitude * |cos(2 pi frequency t)| *
    exp(-decay t)``; every sample then gets one standard normal draw.
    """

    amplitude: float = 50.0
    frequency: float = 0.1
    decay: float = 0.05
    n_samples: int = 2800
    dt: float = 1.0
    seed: int = 7

    def __post_init__(self) -> None:
        if self.amplitude <= 0:
            raise ValueError(f"amplitude must be positive, got {self.amplitude}")
        if self.frequency <= 0:
            raise ValueError(f"frequency must be positive, got {self.frequency}")
        if self.decay < 0:
            raise ValueError(f"decay must be >= 0, got {self.decay}")
        if self.n_samples < 1:
            raise ValueError(f"n_samples must be >= 1, got {self.n_samples}")
        if self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")


# The three standard ball scenarios: drop heights 50/100/200 with slow or
# fast decay, all bouncing at 0.1 Hz, sampled each second.
BALL_GROUPS = {
    1: BallParams(amplitude=50.0, decay=0.05, seed=71),
    2: BallParams(amplitude=100.0, decay=0.1, seed=72),
    3: BallParams(amplitude=200.0, decay=0.1, seed=73),
}


def ball_signal(t: np.ndarray, params: BallParams) -> np.ndarray:
    """Noiseless trajectory at times ``t`` (seconds)."""
    t = np.asarray(t, dtype=np.float64)
    # exp(-x) underflows to 0 where the reciprocal form would overflow.
    return (params.amplitude * np.abs(np.cos(2.0 * np.pi * params.frequency * t))
            * np.exp(-params.decay * t))


def ball_zero_crossings(params: BallParams, count: int) -> np.ndarray:
    """First ``count`` times the noiseless trajectory touches zero:
    t = (2k + 1) / (4 frequency)."""
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    k = np.arange(count, dtype=np.float64)
    return (2.0 * k + 1.0) / (4.0 * params.frequency)


def generate_ball(params: BallParams, *, with_noise: bool = True) -> TimeSeries:
    """Sample the trajectory on its regular grid, optionally with noise."""
    t = params.dt * np.arange(params.n_samples, dtype=np.float64)
    values = ball_signal(t, params)
    if with_noise:
        rng = np.random.default_rng(params.seed)
        values = values + rng.standard_normal(params.n_samples)
    return TimeSeries(t, values, unit=_UNITS[DatasetFamily.BALL],
                      resolution=_THRESHOLDS[DatasetFamily.BALL])


def ball_series(group: int, *, with_noise: bool = True) -> TimeSeries:
    """One of the standard ball scenarios by group number."""
    if group not in BALL_GROUPS:
        raise ValueError(f"ball group must be one of {sorted(BALL_GROUPS)}, got {group}")
    return generate_ball(BALL_GROUPS[group], with_noise=with_noise)


_SCHEMAS = {
    DatasetFamily.INTEL: ("epoch", "moteid", "temperature"),
    DatasetFamily.SENSORSCOPE: ("station", "epoch", "temperature"),
    DatasetFamily.BALL: ("timestamp", "position"),
    DatasetFamily.RUNNING_LATITUDE: ("timestamp", "latitude", "longitude"),
    DatasetFamily.RUNNING_LONGITUDE: ("timestamp", "latitude", "longitude"),
}


def _parse_rows(path, schema: tuple[str, ...]) -> list[tuple[float, ...]]:
    rows = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise DataFormatError(f"{path}: empty file")
        header = tuple(h.strip().lower() for h in header)
        if header != schema:
            raise DataFormatError(
                f"{path}: header {header} does not match expected {schema}"
            )
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(schema):
                raise DataFormatError(
                    f"{path}:{line_no}: expected {len(schema)} fields, got {len(row)}"
                )
            try:
                rows.append(tuple(float(cell) for cell in row))
            except ValueError as exc:
                raise DataFormatError(f"{path}:{line_no}: {exc}") from None
    if not rows:
        raise DataFormatError(f"{path}: no data rows")
    return rows


def _dedupe_sorted(ts: np.ndarray, vs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    order = np.argsort(ts, kind="stable")
    ts, vs = ts[order], vs[order]
    # Last write wins on duplicate timestamps.
    keep = np.concatenate([ts[1:] != ts[:-1], [True]])
    return ts[keep], vs[keep]


def load_csv(path, descriptor: DatasetDescriptor) -> TimeSeries:
    """Read one sensor's series from a CSV file per the family schema.

    Families with a regular cadence are resampled onto their grid with
    interpolation noise on filled points; GPS tracks keep their raw
    timestamps.  The result carries the descriptor's threshold as its
    resolution.
    """
    family = descriptor.family
    rows = _parse_rows(path, _SCHEMAS[family])

    if family in (DatasetFamily.RUNNING_LATITUDE, DatasetFamily.RUNNING_LONGITUDE):
        col = 1 if family is DatasetFamily.RUNNING_LATITUDE else 2
        ts = np.array([r[0] for r in rows])
        vs = np.array([r[col] for r in rows])
    elif family is DatasetFamily.BALL:
        ts = np.array([r[0] for r in rows])
        vs = np.array([r[1] for r in rows])
    else:
        id_col, epoch_col, value_col = (1, 0, 2) if family is DatasetFamily.INTEL else (0, 1, 2)
        ids = np.array([r[id_col] for r in rows])
        distinct = np.unique(ids)
        if descriptor.sensor_id is not None:
            mask = ids == descriptor.sensor_id
            if not np.any(mask):
                raise DataFormatError(
                    f"{path}: no rows for sensor id {descriptor.sensor_id}"
                )
        elif len(distinct) > 1:
            raise DataFormatError(
                f"{path}: {len(distinct)} sensor ids present; descriptor must "
                f"select one via sensor_id"
            )
        else:
            mask = np.ones(len(rows), dtype=bool)
        period = descriptor.period
        ts = np.array([r[epoch_col] for r in rows])[mask] * period
        vs = np.array([r[value_col] for r in rows])[mask]

    ts, vs = _dedupe_sorted(ts, vs)
    if len(ts) < 2:
        raise DataFormatError(f"{path}: need at least two distinct samples")
    series = TimeSeries(ts, vs, unit=descriptor.unit or _UNITS[family],
                        resolution=descriptor.threshold)
    period = descriptor.period
    if period is None:
        return series
    seed = zlib.crc32(f"{family.value}:{descriptor.group}".encode())
    return gap_fill(series, period, seed=seed, noise_scope="filled")


def write_series_csv(path, series: TimeSeries) -> None:
    """Write a series in the ball fixture schema (timestamp, position)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("timestamp,position\n")
        for t, v in zip(series.timestamps, series.values):
            fh.write(f"{float(t)!r},{float(v)!r}\n")
