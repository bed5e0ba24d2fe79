"""BLE RSSI proximity estimation: path-loss calibration, filters, simulation."""

from ._core import (
    Calibration,
    CalibrationError,
    DataError,
    DistanceError,
    DomainError,
    Error,
    ErrorReport,
    FilterParams,
    KalmanFilter,
    MovingAverage,
    NiFilter,
    ParticleFilter,
    ParticleFilterConfig,
    PathLossModel,
    RssiSample,
    RssiTrace,
    SweepRow,
    UsageError,
    calibrate,
    default_distances,
    default_filter_params,
    estimate_distance,
    filter_names,
    filter_trace,
    mae,
    predict_rssi,
    rmse,
    run_benchmark,
    run_experiment,
    simulate,
    sweep,
)

__version__ = "0.1.0"
