import math

import pytest

import proxkit


def test_path_loss_round_trip():
    model = proxkit.PathLossModel(-70.0, 2.0)
    assert model.predict_rssi(2.0) == pytest.approx(-76.02059991327962, abs=1e-12)
    assert model.estimate_distance(model.predict_rssi(2.7)) == pytest.approx(2.7, rel=1e-12)
    with pytest.raises(proxkit.DomainError):
        proxkit.PathLossModel(-70.0, 0.0)
    with pytest.raises(proxkit.Error):
        model.predict_rssi(-1.0)


def test_calibrate_noiseless():
    model = proxkit.PathLossModel(-70.0, 2.0)
    distances = [0.5, 1.0, 2.0, 3.0]
    fit = proxkit.calibrate(distances, [model.predict_rssi(d) for d in distances])
    assert fit.model.c0 == pytest.approx(-70.0, abs=1e-9)
    assert fit.model.n == pytest.approx(2.0, abs=1e-9)
    with pytest.raises(proxkit.CalibrationError):
        proxkit.calibrate([1.0, 1.0], [-70.0, -71.0])


def test_streaming_filters():
    sma = proxkit.MovingAverage(2)
    assert sma.step(-70.0) == -70.0
    assert sma.step(-80.0) == -75.0
    kf = proxkit.KalmanFilter(r_meas=16.0, dynamic=True)
    for _ in range(50):
        assert kf.step(-72.5) == -72.5
    ni = proxkit.NiFilter([(1.0, -70.0), (2.0, -76.0)])
    assert ni.step(-73.0) == 1.5
    cfg = proxkit.ParticleFilterConfig()
    cfg.seed = 3
    pf = proxkit.ParticleFilter(cfg, -75.0, 4.0)
    pf.step(-74.0)
    assert math.isclose(sum(pf.weights), 1.0, abs_tol=1e-9)


def test_simulate_and_evaluate():
    model = proxkit.PathLossModel(-79.35, 1.885)
    trace = proxkit.simulate(model, samples_per_distance=100, seed=7)
    assert len(trace) == 1400
    again = proxkit.simulate(model, samples_per_distance=100, seed=7)
    assert trace.rssi_dbm == again.rssi_dbm
    params = proxkit.default_filter_params(4.0)
    for name in proxkit.filter_names():
        report = proxkit.run_experiment(trace, model, name, params)
        assert report.filter_name == name
        assert len(report.per_distance) == 14
        assert report.mae_m <= report.rmse_m
    estimates = proxkit.filter_trace(trace, "kf-st", model, params)
    assert len(estimates) == len(trace)
    with pytest.raises(proxkit.UsageError):
        proxkit.run_experiment(trace, model, "median", params)


def test_unlabeled_trace_rejected():
    model = proxkit.PathLossModel(-70.0, 2.0)
    trace = proxkit.RssiTrace("b", [0, 100], [-70.0, -71.0])
    params = proxkit.default_filter_params(4.0)
    with pytest.raises(proxkit.DataError):
        proxkit.run_experiment(trace, model, "sma", params)


def test_benchmark_and_sweep():
    reports = proxkit.run_benchmark(samples_per_distance=200, seed=2)
    assert [r.filter_name for r in reports] == proxkit.filter_names()
    model = proxkit.PathLossModel(-79.35, 1.885)
    rows = proxkit.sweep("window-size", [2, 5, 10], model, "sma",
                         proxkit.default_filter_params(4.0), samples_per_distance=200)
    assert [r.value for r in rows] == [2, 5, 10]
    assert rows[0].std_dbm > rows[2].std_dbm
