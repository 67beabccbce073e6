#!/usr/bin/env python3
"""
Resolution tuning

Coarser sensor resolution makes consecutive readings collide more often,
which is exactly what the constant method exploits.  This script sweeps
quantization steps over a ball trace, then asks the calibrator for the
resolution at which half of all consecutive pairs become equal.
"""

from sensorcast import FitConfig, ball_series, quantize_to_resolution, run_dps
from sensorcast.evaluation import calibrate_resolution, equal_pair_fraction

series = ball_series(1).slice(0, 800)

print(f"{'resolution':>10} {'equal pairs':>12} {'constant-method savings':>24}")
for resolution in (0.001, 0.01, 0.1, 1.0, 5.0):
    frac = equal_pair_fraction(series, resolution)
    q = quantize_to_resolution(series, resolution)
    trace = run_dps(q, FitConfig(method="constant"), 50, 20, resolution)
    print(f"{resolution:>10} {frac:>11.1%} {trace.saved_fraction:>23.1f}%")

print()
tuned = calibrate_resolution(series, 0.5)
print(f"calibrated resolution for a 50% equal-pair rate: {tuned:.4f}")
