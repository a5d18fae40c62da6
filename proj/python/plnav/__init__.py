"""Pseudolite-aided GNSS/IMU navigation."""

from ._plnav import (
    DopValues,
    ErrorReport,
    GeodeticCoord,
    ImuNoiseParams,
    ImuSample,
    LsSolution,
    NavError,
    PreintegratedImu,
    ScenarioConfig,
    ScenarioRun,
    ScenarioSummary,
    SimulatedDataset,
    TransmitterKind,
    TransmitterState,
    compute_dop,
    default_scenarios,
    ecef_to_geodetic,
    enu_rotation,
    geodetic_to_ecef,
    gravity_ecef,
    improvement,
    monte_carlo,
    normal_gravity,
    predict_pseudorange,
    preintegrate,
    render_table,
    run_ls,
    run_scenario,
    simulate,
    so3_exp,
    so3_log,
    table_rows,
)


__all__ = [name for name in dir() if not name.startswith("_")]
