"""Scenario evaluation harness.

A scenario fixes a dataset, a method, a history length H and a forecast
window W.  Running it draws seeded rolling-origin splits, fits on each
history, forecasts the window, and records accuracy (MAPE) plus how many
of the W transmissions the threshold rule would have suppressed.  Rows
sharing a seed share split origins exactly, which is what makes the paired
significance test and the fairness rule meaningful.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, replace

import numpy as np

from .datasets import DatasetDescriptor
from .forecast import FitConfig, MethodKind, fit_model, forecast
from .series import TimeSeries, extract_splits, quantize_to_resolution

__all__ = [
    "HISTORY_GRID",
    "WINDOW_GRID",
    "Scenario",
    "ScenarioResult",
    "ComparisonVerdict",
    "MapeUndefined",
    "CalibrationError",
    "mape",
    "run_scenario",
    "count_avoided",
    "compare_to_baseline",
    "fairness_filter",
    "attach_fairness",
    "calibrate_resolution",
    "equal_pair_fraction",
    "emit_report",
    "load_report",
    "manifest_sha256",
]

HISTORY_GRID = (5, 10, 20, 50, 100, 200, 500, 1000)
WINDOW_GRID = (1, 5, 10, 20, 50, 100, 200, 500, 1000)

_ZERO_DENOM = 1e-12


class MapeUndefined(ValueError):
    """Every term had a zero denominator; the mean is undefined."""


class CalibrationError(ValueError):
    """Resolution calibration cannot produce a meaningful answer."""


def mape(actual, predicted) -> tuple[float, int]:
    """Mean absolute percentage error and the count of skipped terms.

    Terms whose actual value is within 1e-12 of zero cannot contribute a
    percentage and are excluded; if that excludes everything the error is
    undefined and :class:`MapeUndefined` is raised.
    """
    actual = np.asarray(actual, dtype=np.float64)
    predicted = np.asarray(predicted, dtype=np.float64)
    if actual.shape != predicted.shape or actual.ndim != 1:
        raise ValueError(
            f"actual and predicted must be equal-length vectors, got "
            f"{actual.shape} and {predicted.shape}"
        )
    if len(actual) == 0:
        raise ValueError("mape needs at least one term")
    keep = np.abs(actual) > _ZERO_DENOM
    skipped = int(len(actual) - np.count_nonzero(keep))
    if not np.any(keep):
        raise MapeUndefined(f"all {len(actual)} terms have zero denominators")
    terms = np.abs(100.0 * (actual[keep] - predicted[keep]) / actual[keep])
    return float(np.mean(terms)), skipped


@dataclass(frozen=True)
class Scenario:
    """One cell of the evaluation grid."""

    descriptor: DatasetDescriptor
    config: FitConfig
    history_len: int
    window_len: int
    n_splits: int = 200
    seed: int = 0

    def __post_init__(self) -> None:
        if self.history_len < 1:
            raise ValueError(f"history_len must be >= 1, got {self.history_len}")
        if self.window_len < 1:
            raise ValueError(f"window_len must be >= 1, got {self.window_len}")
        if self.n_splits < 1:
            raise ValueError(f"n_splits must be >= 1, got {self.n_splits}")


@dataclass(frozen=True, eq=False)
class ScenarioResult:
    """Per-split records plus the aggregates one report row carries.

    ``mape_values`` holds NaN for splits whose MAPE was undefined; such
    splits still contribute avoided-transmission counts.
    """

    scenario: Scenario
    origins: np.ndarray
    mape_values: np.ndarray
    skipped_terms: np.ndarray
    avoided: np.ndarray
    fairness: bool | None = None

    @property
    def n_splits(self) -> int:
        return len(self.origins)

    @property
    def mape_mean(self) -> float:
        defined = self.mape_values[~np.isnan(self.mape_values)]
        if len(defined) == 0:
            return float("nan")
        return float(np.mean(defined))

    @property
    def mape_std(self) -> float:
        defined = self.mape_values[~np.isnan(self.mape_values)]
        if len(defined) < 2:
            return 0.0
        return float(np.std(defined, ddof=1))

    @property
    def ci95(self) -> float:
        defined = np.count_nonzero(~np.isnan(self.mape_values))
        if defined < 2:
            return 0.0
        return float(1.96 * self.mape_std / np.sqrt(defined))

    @property
    def avoided_mean(self) -> float:
        return float(np.mean(self.avoided))

    @property
    def saved_pct(self) -> float:
        return 100.0 * self.avoided_mean / self.scenario.window_len

    @property
    def model_updates_per_window(self) -> int:
        # One refit ships per completed window; value-holding ships none.
        return 0 if self.scenario.config.method is MethodKind.CONSTANT else 1

    @property
    def skipped_total(self) -> int:
        return int(np.sum(self.skipped_terms))

    def to_json_dict(self) -> dict:
        s = self.scenario
        return {
            "family": s.descriptor.family.value,
            "group": s.descriptor.group,
            "method": s.config.method.value,
            "H": s.history_len,
            "W": s.window_len,
            "n_splits": s.n_splits,
            "seed": s.seed,
            "delta_min": s.descriptor.threshold,
            "mape_mean": self.mape_mean,
            "mape_std": self.mape_std,
            "ci95": self.ci95,
            "avoided_mean": self.avoided_mean,
            "saved_pct": self.saved_pct,
            "model_updates": self.model_updates_per_window,
            "fairness": self.fairness,
            "skipped_terms": self.skipped_total,
            "per_split": {
                "origins": [int(v) for v in self.origins],
                "mape": [None if np.isnan(v) else float(v) for v in self.mape_values],
                "skipped": [int(v) for v in self.skipped_terms],
                "avoided": [int(v) for v in self.avoided],
            },
        }


def count_avoided(method: MethodKind, history_last: float, window: np.ndarray,
                  predicted: np.ndarray, delta_min: float) -> int:
    """Window steps the threshold rule would have suppressed.

    The value-holding method re-anchors on every transmitted value, exactly
    as its protocol run does; every other method forecasts the whole window
    from the fit, so suppression is a pointwise comparison.
    """
    if method is MethodKind.CONSTANT:
        base = history_last
        avoided = 0
        for value in window:
            if abs(value - base) < delta_min:
                avoided += 1
            else:
                base = value
        return avoided
    return int(np.count_nonzero(np.abs(predicted - window) < delta_min))


def run_scenario(scenario: Scenario, series: TimeSeries) -> ScenarioResult:
    """Evaluate one grid cell over its seeded splits."""
    s = scenario
    splits = extract_splits(series, s.history_len, s.window_len, s.n_splits, s.seed)
    delta = s.descriptor.threshold
    origins = np.array([sp.origin for sp in splits], dtype=np.int64)
    mape_values = np.empty(len(splits))
    skipped = np.zeros(len(splits), dtype=np.int64)
    avoided = np.zeros(len(splits), dtype=np.int64)
    for i, sp in enumerate(splits):
        model = fit_model(sp.history, s.config)
        predicted = forecast(model, s.window_len)
        try:
            mape_values[i], skipped[i] = mape(sp.window, predicted)
        except MapeUndefined:
            mape_values[i] = np.nan
            skipped[i] = s.window_len
        avoided[i] = count_avoided(s.config.method, sp.history[-1], sp.window,
                                   predicted, delta)
    return ScenarioResult(scenario=s, origins=origins, mape_values=mape_values,
                          skipped_terms=skipped, avoided=avoided)


@dataclass(frozen=True)
class ComparisonVerdict:
    significant: bool
    mean_difference: float
    ci_half_width: float
    n: int
    direction: str  # "candidate", "baseline", or "none"


def _require_same_splits(a: ScenarioResult, b: ScenarioResult) -> None:
    if a.scenario.seed != b.scenario.seed or not np.array_equal(a.origins, b.origins):
        raise ValueError(
            "rows were evaluated on different split sets; rerun both with a "
            "shared seed before comparing"
        )


def compare_to_baseline(candidate: ScenarioResult,
                        baseline: ScenarioResult) -> ComparisonVerdict:
    """Paired per-split MAPE comparison with a 95% normal CI.

    Positive differences mean the candidate had lower error.  Splits where
    either side's MAPE was undefined are dropped pairwise.
    """
    _require_same_splits(candidate, baseline)
    diffs = baseline.mape_values - candidate.mape_values
    diffs = diffs[~np.isnan(diffs)]
    n = len(diffs)
    if n < 2:
        raise ValueError(f"need >= 2 paired splits with defined MAPE, have {n}")
    mean = float(np.mean(diffs))
    half = 1.96 * float(np.std(diffs, ddof=1)) / np.sqrt(n)
    significant = (mean - half > 0.0) or (mean + half < 0.0)
    if significant:
        direction = "candidate" if mean > 0 else "baseline"
    else:
        direction = "none"
    return ComparisonVerdict(significant=significant, mean_difference=mean,
                             ci_half_width=half, n=n, direction=direction)


def fairness_filter(candidate: ScenarioResult, constant_row: ScenarioResult,
                    window_len: int) -> bool:
    """True when the candidate suppresses at least two more transmissions
    per window than value-holding on the same splits."""
    _require_same_splits(candidate, constant_row)
    if (candidate.scenario.window_len != window_len
            or constant_row.scenario.window_len != window_len):
        raise ValueError("rows were evaluated with a different window length")
    if constant_row.scenario.config.method is not MethodKind.CONSTANT:
        raise ValueError("baseline row must come from the value-holding method")
    return candidate.avoided_mean - constant_row.avoided_mean >= 2.0


def equal_pair_fraction(series: TimeSeries, resolution: float) -> float:
    """Fraction of consecutive pairs that coincide after quantization."""
    q = quantize_to_resolution(series, resolution).values
    if len(q) < 2:
        raise ValueError("need at least two samples")
    return float(np.mean(q[1:] == q[:-1]))


def calibrate_resolution(series: TimeSeries, target: float = 0.5) -> float:
    """Smallest grid resolution making ``target`` of consecutive pairs equal.

    Scans a 1024-point geometric grid spanning the positive consecutive
    differences; if the whole span quantizes too finely, a geometric tail
    up to four times the largest difference is scanned as well.  The
    fraction is not monotone in r near bin boundaries, which is why this
    scans instead of bisecting.
    """
    if len(series) < 2:
        raise ValueError("calibration needs at least two samples")
    if not (0.0 < target < 1.0):
        raise ValueError(f"target must lie in (0, 1), got {target}")
    adiffs = np.abs(np.diff(series.values))
    positive = adiffs[adiffs > 0]
    if len(positive) == 0:
        raise CalibrationError("series is constant; every resolution satisfies the target")
    lo = float(np.min(positive))
    hi = float(np.max(adiffs))
    grid = np.geomspace(lo, hi, 1024) if hi > lo else np.array([lo])
    for r in grid:
        if equal_pair_fraction(series, float(r)) >= target:
            return float(r)
    for r in np.geomspace(hi, 4.0 * hi, 256)[1:]:
        if equal_pair_fraction(series, float(r)) >= target:
            return float(r)
    raise CalibrationError(
        f"no resolution up to {4.0 * hi!r} reaches an equal-pair fraction of {target}"
    )


def manifest_sha256(manifest: dict | None) -> str:
    """Stable digest of a manifest dict (sorted keys, compact separators)."""
    canonical = json.dumps(manifest or {}, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


_CSV_COLUMNS = (
    "family", "group", "method", "H", "W", "mape_mean", "mape_std", "ci95",
    "avoided_mean", "saved_pct", "model_updates", "fairness", "skipped_terms",
    "manifest_sha256",
)


def _atomic_write(path, text: str) -> None:
    tmp = f"{path}.tmp"
    try:
        with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        raise OSError(f"writing report {path}: {exc}") from exc


def emit_report(rows, json_path, csv_path, *, manifest: dict | None = None) -> str:
    """Write the JSON (full fidelity) and CSV (flat) reports atomically.

    Returns the manifest digest embedded in both files.  Field order is
    fixed, floats are rendered by ``repr``, so identical rows always
    produce identical bytes.
    """
    rows = list(rows)
    if not rows:
        raise ValueError("emit_report needs at least one row")
    digest = manifest_sha256(manifest)
    payload = {
        "manifest": manifest or {},
        "manifest_sha256": digest,
        "rows": [r.to_json_dict() for r in rows],
    }
    _atomic_write(json_path, json.dumps(payload, indent=2, sort_keys=True) + "\n")

    def cell(value) -> str:
        if value is None:
            return ""
        if isinstance(value, bool):
            return "true" if value else "false"
        if isinstance(value, float):
            # numpy scalars subclass float but repr differently
            return repr(float(value))
        return str(value)

    lines = [",".join(_CSV_COLUMNS)]
    for r in rows:
        d = r.to_json_dict()
        d["manifest_sha256"] = digest
        lines.append(",".join(cell(d[col]) for col in _CSV_COLUMNS))
    _atomic_write(csv_path, "\n".join(lines) + "\n")
    return digest


def load_report(json_path) -> dict:
    """Parse a JSON report written by :func:`emit_report`."""
    with open(json_path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def attach_fairness(rows: list[ScenarioResult]) -> list[ScenarioResult]:
    """Fill the fairness flag on every row that has a value-holding
    counterpart over the same (dataset, H, W) cell."""
    constants = {}
    for row in rows:
        s = row.scenario
        if s.config.method is MethodKind.CONSTANT:
            key = (s.descriptor.family, s.descriptor.group, s.history_len,
                   s.window_len, s.seed)
            constants[key] = row
    out = []
    for row in rows:
        s = row.scenario
        key = (s.descriptor.family, s.descriptor.group, s.history_len,
               s.window_len, s.seed)
        base = constants.get(key)
        if base is None or s.config.method is MethodKind.CONSTANT:
            out.append(row)
        else:
            out.append(replace(row, fairness=fairness_filter(row, base, s.window_len)))
    return out
