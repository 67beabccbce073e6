from __future__ import annotations

import numpy as np
import pytest

from sensorcast.datasets import (
    BALL_GROUPS,
    BallParams,
    DataFormatError,
    DatasetFamily,
    ball_series,
    ball_signal,
    ball_zero_crossings,
    builtin_threshold,
    descriptor_for,
    generate_ball,
    load_csv,
    write_series_csv,
)
from sensorcast.series import TimeSeries


def test_builtin_thresholds_are_the_documented_sensor_resolutions():
    assert builtin_threshold("intel") == 0.01
    assert builtin_threshold("sensorscope") == pytest.approx(185.0 / 4096.0)
    assert builtin_threshold("sensorscope") == pytest.approx(0.045166, abs=1e-6)
    assert builtin_threshold("ball") == 0.001
    assert builtin_threshold("running_latitude") == 8.38e-8
    assert builtin_threshold("running_longitude") == 8.38e-8
    with pytest.raises(ValueError):
        builtin_threshold("humidity")


def test_descriptor_defaults_and_overrides():
    d = descriptor_for("intel", 2)
    assert d.family is DatasetFamily.INTEL
    assert d.group == 2
    assert d.threshold == 0.01
    assert d.period == 31.0
    assert d.unit == "degC"
    assert d.label == "intel-g2"

    custom = descriptor_for("intel", 1, delta_min=0.5, expected_period=60.0)
    assert custom.threshold == 0.5
    assert custom.period == 60.0

    gps = descriptor_for("running_latitude")
    assert gps.period is None
    with pytest.raises(ValueError):
        descriptor_for("ball", 0)


def test_ball_params_validation():
    with pytest.raises(ValueError):
        BallParams(amplitude=0.0)
    with pytest.raises(ValueError):
        BallParams(frequency=0.0)
    with pytest.raises(ValueError):
        BallParams(decay=-0.1)
    with pytest.raises(ValueError):
        BallParams(n_samples=0)
    with pytest.raises(ValueError):
        BallParams(dt=0.0)


def test_standard_ball_groups():
    assert sorted(BALL_GROUPS) == [1, 2, 3]
    assert BALL_GROUPS[1].amplitude == 50.0 and BALL_GROUPS[1].decay == 0.05
    assert BALL_GROUPS[2].amplitude == 100.0 and BALL_GROUPS[2].decay == 0.1
    assert BALL_GROUPS[3].amplitude == 200.0 and BALL_GROUPS[3].decay == 0.1
    for params in BALL_GROUPS.values():
        assert params.frequency == 0.1
        assert params.n_samples == 2800
        assert params.dt == 1.0


def test_ball_signal_closed_form():
    params = BallParams(amplitude=50.0, frequency=0.1, decay=0.05)
    t = np.array([0.0, 1.0, 2.5, 10.0])
    expected = 50.0 * np.abs(np.cos(2.0 * np.pi * 0.1 * t)) * np.exp(-0.05 * t)
    np.testing.assert_allclose(ball_signal(t, params), expected, rtol=1e-15)
    # Envelope bound: the trajectory never exceeds the decayed amplitude.
    tt = np.linspace(0.0, 100.0, 5000)
    sig = ball_signal(tt, params)
    assert np.all(sig <= 50.0 * np.exp(-0.05 * tt) + 1e-12)
    assert np.all(sig >= 0.0)


def test_ball_zero_crossings_formula():
    params = BallParams(frequency=0.1)
    crossings = ball_zero_crossings(params, 4)
    np.testing.assert_allclose(crossings, [2.5, 7.5, 12.5, 17.5], rtol=1e-15)
    # cos vanishes there, so the noiseless signal does too.
    np.testing.assert_allclose(ball_signal(crossings, params), 0.0, atol=1e-12)
    with pytest.raises(ValueError):
        ball_zero_crossings(params, 0)


def test_generate_ball_noise_is_seeded_unit_normal():
    params = BallParams(seed=99, n_samples=50_000)
    clean = generate_ball(params, with_noise=False)
    noisy = generate_ball(params)
    again = generate_ball(params)
    np.testing.assert_array_equal(noisy.values, again.values)
    residual = noisy.values - clean.values
    assert abs(np.mean(residual)) < 0.02
    assert abs(np.std(residual) - 1.0) < 0.02
    assert noisy.unit == "m"
    assert noisy.resolution == 0.001


def test_ball_series_group_gate():
    s = ball_series(1)
    assert len(s) == 2800
    assert s.timestamps[1] - s.timestamps[0] == 1.0
    with pytest.raises(ValueError):
        ball_series(4)


def test_ball_csv_round_trip(tmp_path):
    series = ball_series(2)
    path = tmp_path / "ball.csv"
    write_series_csv(path, series)
    loaded = load_csv(path, descriptor_for("ball", 2))
    np.testing.assert_array_equal(loaded.timestamps, series.timestamps)
    np.testing.assert_array_equal(loaded.values, series.values)


def test_load_intel_schema(tmp_path):
    path = tmp_path / "intel.csv"
    path.write_text(
        "epoch,moteid,temperature\n"
        "1,7,20.0\n"
        "2,7,20.5\n"
        "3,7,21.0\n"
    )
    s = load_csv(path, descriptor_for("intel"))
    # Epochs scale by the 31 s reporting period.
    np.testing.assert_array_equal(s.timestamps, [31.0, 62.0, 93.0])
    np.testing.assert_array_equal(s.values, [20.0, 20.5, 21.0])
    assert s.resolution == 0.01
    assert s.unit == "degC"


def test_load_sensorscope_schema_column_order(tmp_path):
    path = tmp_path / "station.csv"
    path.write_text(
        "station,epoch,temperature\n"
        "3,10,5.0\n"
        "3,11,5.5\n"
    )
    s = load_csv(path, descriptor_for("sensorscope"))
    np.testing.assert_array_equal(s.timestamps, [300.0, 330.0])
    np.testing.assert_array_equal(s.values, [5.0, 5.5])


def test_load_with_gap_gets_interpolation_noise(tmp_path):
    path = tmp_path / "gappy.csv"
    # Epoch 3 missing: the grid point is filled with noisy interpolation.
    path.write_text(
        "epoch,moteid,temperature\n"
        "1,7,20.0\n2,7,21.0\n4,7,23.0\n5,7,24.0\n"
    )
    s = load_csv(path, descriptor_for("intel"))
    assert len(s) == 5
    np.testing.assert_array_equal(s.values[[0, 1, 3, 4]], [20.0, 21.0, 23.0, 24.0])
    assert s.values[2] != 22.0  # interpolated then perturbed
    assert abs(s.values[2] - 22.0) < 1.0
    # Loading is deterministic: the fill seed comes from the descriptor.
    again = load_csv(path, descriptor_for("intel"))
    np.testing.assert_array_equal(s.values, again.values)


def test_load_multi_sensor_requires_selector(tmp_path):
    path = tmp_path / "two_motes.csv"
    path.write_text(
        "epoch,moteid,temperature\n"
        "1,7,20.0\n1,8,30.0\n2,7,21.0\n2,8,31.0\n"
    )
    with pytest.raises(DataFormatError, match="sensor id"):
        load_csv(path, descriptor_for("intel"))
    s7 = load_csv(path, descriptor_for("intel", sensor_id=7))
    np.testing.assert_array_equal(s7.values, [20.0, 21.0])
    s8 = load_csv(path, descriptor_for("intel", sensor_id=8))
    np.testing.assert_array_equal(s8.values, [30.0, 31.0])
    with pytest.raises(DataFormatError, match="no rows"):
        load_csv(path, descriptor_for("intel", sensor_id=99))


def test_load_duplicate_epochs_last_wins(tmp_path):
    path = tmp_path / "dup.csv"
    path.write_text(
        "epoch,moteid,temperature\n"
        "1,7,20.0\n2,7,99.0\n2,7,21.0\n3,7,22.0\n"
    )
    s = load_csv(path, descriptor_for("intel"))
    np.testing.assert_array_equal(s.values, [20.0, 21.0, 22.0])


def test_load_running_track_keeps_raw_timestamps(tmp_path):
    path = tmp_path / "run.csv"
    path.write_text(
        "timestamp,latitude,longitude\n"
        "0.0,45.1,7.6\n"
        "1.5,45.2,7.7\n"
        "9.0,45.3,7.9\n"
    )
    lat = load_csv(path, descriptor_for("running_latitude"))
    lon = load_csv(path, descriptor_for("running_longitude"))
    np.testing.assert_array_equal(lat.timestamps, [0.0, 1.5, 9.0])
    np.testing.assert_array_equal(lat.values, [45.1, 45.2, 45.3])
    np.testing.assert_array_equal(lon.values, [7.6, 7.7, 7.9])
    assert lat.resolution == 8.38e-8


def test_load_rejects_schema_violations(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    with pytest.raises(DataFormatError, match="empty"):
        load_csv(empty, descriptor_for("intel"))

    wrong_header = tmp_path / "wrong.csv"
    wrong_header.write_text("time,value\n1,2\n")
    with pytest.raises(DataFormatError, match="header"):
        load_csv(wrong_header, descriptor_for("intel"))

    bad_field = tmp_path / "bad.csv"
    bad_field.write_text("epoch,moteid,temperature\n1,7,warm\n")
    with pytest.raises(DataFormatError, match="bad.csv:2"):
        load_csv(bad_field, descriptor_for("intel"))

    short_row = tmp_path / "short.csv"
    short_row.write_text("epoch,moteid,temperature\n1,7\n")
    with pytest.raises(DataFormatError, match="expected 3 fields"):
        load_csv(short_row, descriptor_for("intel"))

    no_rows = tmp_path / "norows.csv"
    no_rows.write_text("epoch,moteid,temperature\n")
    with pytest.raises(DataFormatError, match="no data rows"):
        load_csv(no_rows, descriptor_for("intel"))


def test_load_tolerates_blank_lines_and_header_case(tmp_path):
    path = tmp_path / "messy.csv"
    path.write_text(
        "Epoch, MoteId ,Temperature\n"
        "1,7,20.0\n"
        "\n"
        "2,7,21.0\n"
    )
    s = load_csv(path, descriptor_for("intel"))
    assert len(s) == 2
