"""Dual-prediction transmission suppression between a sensor and its gateway.

Both endpoints run the same forecasting model.  The sensor transmits a
measurement only when its own forecast misses the true value by at least
the threshold; otherwise the gateway's identical forecast stands in for the
reading.  Models travel as periodic updates: one rides along with the last
bootstrap measurement, after that one follows each completed forecast
window.  The value-holding method is the degenerate case: its "model" is
the last transmitted value, so it never ships updates.

The sensor applies the model it *shipped* (encode/decode round trip), so
sensor and gateway forecasts are bit-identical and the reconstruction error
of every untransmitted step is strictly below the threshold.
"""

from __future__ import annotations

import json
import struct
from collections import deque
from dataclasses import dataclass

import numpy as np

from .forecast import FitConfig, FitError, ForecastModel, MethodKind, fit_constant, fit_model, forecast
from .series import TimeSeries

__all__ = [
    "Measurement",
    "ModelUpdate",
    "DpsMessage",
    "DpsProtocolError",
    "SensorNode",
    "Gateway",
    "DpsTrace",
    "run_dps",
    "count_model_overhead",
    "encode_message",
    "decode_message",
]


class DpsProtocolError(RuntimeError):
    """Message stream violates the protocol contract."""


@dataclass(frozen=True)
class Measurement:
    seq: int
    index: int
    value: float


@dataclass(frozen=True, eq=False)
class ModelUpdate:
    seq: int
    model: ForecastModel
    piggybacked: bool = False


DpsMessage = Measurement | ModelUpdate

_TAG_MODEL_UPDATE = 0x01
_TAG_MEASUREMENT = 0x02

_KIND_CODES = {
    MethodKind.CONSTANT: 0,
    MethodKind.LINEAR: 1,
    MethodKind.SIMPLE_MEAN: 2,
    MethodKind.EXPONENTIAL_SMOOTHING: 3,
    MethodKind.ARIMA: 4,
}
_CODE_KINDS = {v: k for k, v in _KIND_CODES.items()}


def _payload_sizes(kind: MethodKind, orders: tuple[int, int, int]) -> tuple[int, int]:
    """(param count, state count) implied by kind and orders."""
    if kind is MethodKind.CONSTANT or kind is MethodKind.SIMPLE_MEAN:
        return 1, 0
    if kind is MethodKind.LINEAR:
        return 2, 0
    if kind is MethodKind.EXPONENTIAL_SMOOTHING:
        return orders[0], orders[0]
    p, d, q = orders
    return p + q + 1, p + q + d


def encode_message(msg: DpsMessage) -> bytes:
    """Wire encoding: 1-byte variant tag, little-endian fields.

    ModelUpdate: u32 seq, u8 kind, u8 packed orders, u16 float count, then
    the model's params followed by its state as float64.  Measurement:
    u32 seq, u32 index, float64 value.
    """
    if isinstance(msg, Measurement):
        return struct.pack("<BIId", _TAG_MEASUREMENT, msg.seq, msg.index, msg.value)
    model = msg.model
    p, d, q = model.orders
    packed = (p << 4) | (d << 2) | q
    floats = np.concatenate([model.params, model.state])
    return struct.pack(
        f"<BIBBH{len(floats)}d",
        _TAG_MODEL_UPDATE, msg.seq, _KIND_CODES[model.kind], packed,
        len(floats), *floats,
    )


def decode_message(data: bytes, *, piggybacked: bool = False) -> DpsMessage:
    """Inverse of :func:`encode_message`; malformed input raises
    :class:`DpsProtocolError`."""
    if len(data) < 1:
        raise DpsProtocolError("empty message")
    tag = data[0]
    if tag == _TAG_MEASUREMENT:
        if len(data) != struct.calcsize("<BIId"):
            raise DpsProtocolError(f"measurement payload has {len(data)} bytes")
        _, seq, index, value = struct.unpack("<BIId", data)
        return Measurement(seq=seq, index=index, value=value)
    if tag != _TAG_MODEL_UPDATE:
        raise DpsProtocolError(f"unknown message tag 0x{tag:02x}")
    head = struct.calcsize("<BIBBH")
    if len(data) < head:
        raise DpsProtocolError(f"model update header truncated at {len(data)} bytes")
    _, seq, kind_code, packed, count = struct.unpack("<BIBBH", data[:head])
    if kind_code not in _CODE_KINDS:
        raise DpsProtocolError(f"unknown model kind code {kind_code}")
    kind = _CODE_KINDS[kind_code]
    orders = ((packed >> 4) & 0x3, (packed >> 2) & 0x3, packed & 0x3)
    n_params, n_state = _payload_sizes(kind, orders)
    if count != n_params + n_state:
        raise DpsProtocolError(
            f"{kind.value}{orders} update carries {count} floats, expected "
            f"{n_params + n_state}"
        )
    if len(data) != head + 8 * count:
        raise DpsProtocolError(f"model update payload has {len(data) - head} bytes, "
                               f"expected {8 * count}")
    floats = np.frombuffer(data, dtype="<f8", count=count, offset=head)
    model = ForecastModel(kind=kind, orders=orders, params=floats[:n_params],
                          state=floats[n_params:])
    return ModelUpdate(seq=seq, model=model, piggybacked=piggybacked)


def _wire_round_trip(model: ForecastModel) -> ForecastModel:
    # The sensor forecasts from the model as the gateway will see it.
    decoded = decode_message(encode_message(ModelUpdate(seq=0, model=model)))
    return decoded.model


class SensorNode:
    """Sensor endpoint: decides transmissions, refits at window boundaries."""

    def __init__(self, config: FitConfig, history_len: int, window_len: int,
                 delta_min: float):
        if history_len < 1:
            raise ValueError(f"history_len must be >= 1, got {history_len}")
        if window_len < 1:
            raise ValueError(f"window_len must be >= 1, got {window_len}")
        if not (delta_min > 0):
            raise ValueError(f"delta_min must be positive, got {delta_min}")
        self.config = config
        self.history_len = history_len
        self.window_len = window_len
        self.delta_min = delta_min
        self._buffer: deque[float] = deque(maxlen=history_len)
        self._seq = 0
        self._t = 0
        self._base = 0.0
        self._window_forecast: np.ndarray | None = None
        self._window_pos = 0
        self.fallback_steps: list[int] = []

    @property
    def _is_constant(self) -> bool:
        return self.config.method is MethodKind.CONSTANT

    def _next_seq(self) -> int:
        seq = self._seq
        self._seq += 1
        return seq

    def _refit(self, *, piggybacked: bool) -> ModelUpdate:
        history = np.array(self._buffer)
        try:
            model = fit_model(history, self.config)
        except FitError:
            model = fit_constant(history)
            self.fallback_steps.append(self._t - 1)
        update = ModelUpdate(seq=self._next_seq(), model=model, piggybacked=piggybacked)
        self._window_forecast = forecast(_wire_round_trip(model), self.window_len)
        self._window_pos = 0
        return update

    def step(self, value: float) -> list[DpsMessage]:
        """Process one reading; returns the messages to transmit (0 to 2)."""
        value = float(value)
        t = self._t
        messages: list[DpsMessage] = []

        if t < self.history_len:
            # Bootstrap: relay raw readings so the gateway sees the same
            # history the first fit will use.
            messages.append(Measurement(seq=self._next_seq(), index=t, value=value))
            self._buffer.append(value)
            self._t += 1
            if self._t == self.history_len:
                if self._is_constant:
                    self._base = value
                else:
                    messages.append(self._refit(piggybacked=True))
            return messages

        if self._is_constant:
            if abs(value - self._base) >= self.delta_min:
                messages.append(Measurement(seq=self._next_seq(), index=t, value=value))
                self._base = value
            self._buffer.append(value)
            self._t += 1
            return messages

        predicted = self._window_forecast[self._window_pos]
        if abs(predicted - value) >= self.delta_min:
            messages.append(Measurement(seq=self._next_seq(), index=t, value=value))
        self._buffer.append(value)
        self._window_pos += 1
        self._t += 1
        if self._window_pos == self.window_len:
            messages.append(self._refit(piggybacked=False))
        return messages


class Gateway:
    """Gateway endpoint: reconstructs the stream from messages and forecasts."""

    def __init__(self, method: MethodKind, history_len: int, window_len: int):
        self.method = method
        self.history_len = history_len
        self.window_len = window_len
        self.reconstructed: list[float] = []
        self._base: float | None = None
        self._window_forecast: np.ndarray | None = None
        self._window_pos = 0

    def step(self, messages) -> float:
        """Consume one step's messages and return the reconstructed value."""
        measurement = None
        update = None
        for msg in messages:
            if isinstance(msg, Measurement):
                if measurement is not None:
                    raise DpsProtocolError("more than one measurement in a step")
                measurement = msg
            elif isinstance(msg, ModelUpdate):
                if update is not None:
                    raise DpsProtocolError("more than one model update in a step")
                update = msg
            else:
                raise DpsProtocolError(f"unknown message type {type(msg).__name__}")

        t = len(self.reconstructed)
        if measurement is not None:
            if measurement.index != t:
                raise DpsProtocolError(
                    f"measurement for index {measurement.index} outside the "
                    f"current position {t}"
                )
            value = measurement.value
        elif t < self.history_len:
            raise DpsProtocolError(f"missing bootstrap measurement at step {t}")
        elif self.method is MethodKind.CONSTANT:
            if self._base is None:
                raise DpsProtocolError("no held value established yet")
            value = self._base
        else:
            if self._window_forecast is None:
                raise DpsProtocolError("no model established by a prior update")
            if self._window_pos >= len(self._window_forecast):
                raise DpsProtocolError(f"forecast window exhausted at step {t}")
            value = float(self._window_forecast[self._window_pos])

        self.reconstructed.append(value)
        if self.method is MethodKind.CONSTANT:
            if measurement is not None:
                self._base = value
        elif t >= self.history_len:
            self._window_pos += 1
        if update is not None:
            model = _wire_round_trip(update.model)
            self._window_forecast = forecast(model, self.window_len)
            self._window_pos = 0
        return value


@dataclass(frozen=True, eq=False)
class DpsTrace:
    """Complete record of one sensor/gateway run."""

    method: MethodKind
    history_len: int
    window_len: int
    delta_min: float
    reconstructed: TimeSeries
    messages: tuple[tuple[int, DpsMessage], ...]
    fallback_steps: tuple[int, ...]

    @property
    def n_steps(self) -> int:
        return len(self.reconstructed)

    @property
    def measurement_count(self) -> int:
        return sum(1 for _, m in self.messages if isinstance(m, Measurement))

    @property
    def post_bootstrap_measurements(self) -> int:
        return sum(
            1 for _, m in self.messages
            if isinstance(m, Measurement) and m.index >= self.history_len
        )

    @property
    def saved_fraction(self) -> float:
        """Percent of post-bootstrap steps that needed no measurement."""
        post = self.n_steps - self.history_len
        return 100.0 * (post - self.post_bootstrap_measurements) / post

    def measurements_per_window(self) -> list[int]:
        """Measurement counts per forecast window, trailing partial included."""
        post = self.n_steps - self.history_len
        n_windows = -(-post // self.window_len)
        counts = [0] * n_windows
        for _, m in self.messages:
            if isinstance(m, Measurement) and m.index >= self.history_len:
                counts[(m.index - self.history_len) // self.window_len] += 1
        return counts

    def to_jsonl(self, path, *, extra_header: dict | None = None) -> None:
        """One JSON object per line: header, every message, then a summary."""
        header = {
            "type": "header",
            "method": self.method.value,
            "history_len": self.history_len,
            "window_len": self.window_len,
            "delta_min": self.delta_min,
            "n_steps": self.n_steps,
        }
        if extra_header:
            header.update(extra_header)
        lines = [json.dumps(header, sort_keys=True)]
        for step, msg in self.messages:
            if isinstance(msg, Measurement):
                lines.append(json.dumps({
                    "type": "measurement", "step": step, "seq": msg.seq,
                    "index": msg.index, "value": msg.value,
                }, sort_keys=True))
            else:
                lines.append(json.dumps({
                    "type": "model_update", "step": step, "seq": msg.seq,
                    "piggybacked": msg.piggybacked,
                    "model": msg.model.to_json_dict(),
                }, sort_keys=True))
        lines.append(json.dumps({
            "type": "summary",
            "measurements": self.measurement_count,
            "model_updates": count_model_overhead(self),
            "fallback_steps": list(self.fallback_steps),
            "saved_fraction": self.saved_fraction,
        }, sort_keys=True))
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")


def run_dps(series: TimeSeries, config: FitConfig, history_len: int,
            window_len: int, delta_min: float) -> DpsTrace:
    """Run the full protocol over a series and return the trace.

    The series must cover the bootstrap plus at least one forecast window.
    Reconstruction obeys the quality guarantee: transmitted steps match
    exactly, suppressed steps err strictly below ``delta_min``.
    """
    if len(series) < history_len + window_len:
        raise ValueError(
            f"series of length {len(series)} too short for bootstrap "
            f"{history_len} + window {window_len}"
        )
    sensor = SensorNode(config, history_len, window_len, delta_min)
    gateway = Gateway(config.method, history_len, window_len)
    log: list[tuple[int, DpsMessage]] = []
    for t, value in enumerate(series.values):
        messages = sensor.step(value)
        gateway.step(messages)
        log.extend((t, m) for m in messages)
    reconstructed = TimeSeries(
        series.timestamps, np.array(gateway.reconstructed),
        unit=series.unit, resolution=series.resolution,
    )
    return DpsTrace(
        method=config.method,
        history_len=history_len,
        window_len=window_len,
        delta_min=delta_min,
        reconstructed=reconstructed,
        messages=tuple(log),
        fallback_steps=tuple(sensor.fallback_steps),
    )


def count_model_overhead(trace: "DpsTrace") -> int:
    """Model updates that needed their own transmission (piggybacked ones
    ride inside a bootstrap packet and are excluded)."""
    return sum(
        1 for _, msg in trace.messages
        if isinstance(msg, ModelUpdate) and not msg.piggybacked
    )
