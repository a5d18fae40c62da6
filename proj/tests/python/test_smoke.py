import math

import numpy as np
import pytest

import plnav


def test_geodetic_round_trip():
    g = plnav.GeodeticCoord(0.8391543043588736, 0.20315632493213998, 530.0)
    back = plnav.ecef_to_geodetic(plnav.geodetic_to_ecef(g))
    assert back.latitude == pytest.approx(g.latitude, abs=1e-12)
    assert back.longitude == pytest.approx(g.longitude, abs=1e-12)
    assert back.height == pytest.approx(g.height, abs=1e-6)
    C = plnav.enu_rotation(g)
    np.testing.assert_allclose(C @ C.T, np.eye(3), atol=1e-12)


def test_so3_round_trip():
    theta = np.array([0.3, -0.2, 1.1])
    np.testing.assert_allclose(plnav.so3_log(plnav.so3_exp(theta)), theta, atol=1e-12)


def test_dop_matches_numpy():
    g = plnav.GeodeticCoord(0.6, -1.2, 50.0)
    p = plnav.geodetic_to_ecef(g)
    C = plnav.enu_rotation(g)
    dirs = [(0.0, 1.2), (1.5, 0.4), (3.0, 0.6), (4.5, 0.3), (5.5, 0.9)]
    txs = []
    for i, (az, el) in enumerate(dirs):
        los = np.array([math.cos(el) * math.sin(az), math.cos(el) * math.cos(az), math.sin(el)])
        txs.append(plnav.TransmitterState(f"G{i}", plnav.TransmitterKind.GNSS_SATELLITE, p + C.T @ (2.2e7 * los)))
    G = np.array([np.append(-(t.position - p) / np.linalg.norm(t.position - p), 1.0) for t in txs])
    Q = np.linalg.inv(G.T @ G)
    d = plnav.compute_dop(txs, p)
    assert d.gdop == pytest.approx(math.sqrt(np.trace(Q)), rel=1e-9)
    assert d.pdop ** 2 == pytest.approx(d.hdop ** 2 + d.vdop ** 2, rel=1e-12)


def test_predict_pseudorange():
    tx = plnav.TransmitterState("PL01", plnav.TransmitterKind.PSEUDOLITE, np.array([3.0, 4.0, 0.0]), 0.5)
    assert plnav.predict_pseudorange(tx, np.zeros(3), 2.0) == pytest.approx(6.5)


def test_preintegrate_stationary():
    samples = [plnav.ImuSample(k / 200.0, np.zeros(3), np.array([0.0, 0.0, 9.8])) for k in range(1, 201)]
    pre = plnav.preintegrate(samples, 0.0, 1.0)
    assert pre.num_samples == 200
    assert pre.dt_total == pytest.approx(1.0)
    np.testing.assert_allclose(pre.delta_v, [0.0, 0.0, 9.8], atol=1e-9)
    np.testing.assert_allclose(pre.delta_p, [0.0, 0.0, 4.9], atol=1e-9)
    assert np.all(np.linalg.eigvalsh(pre.covariance) > 0)


def test_default_scenarios():
    names = [c.name for c in plnav.default_scenarios()]
    assert names == ["GPS", "GPS+2PL", "GPS+PL01", "GPS+PL02"]
    assert [c.num_pseudolites for c in plnav.default_scenarios()] == [0, 2, 1, 1]


def test_config_yaml_round_trip_and_errors():
    cfg = plnav.default_scenarios(seed=9)[1]
    back = plnav.ScenarioConfig.from_yaml(cfg.to_yaml())
    assert back.to_yaml() == cfg.to_yaml()
    assert back.seed == 9
    with pytest.raises(plnav.NavError) as info:
        plnav.ScenarioConfig.from_yaml("bogus: 1\n")
    assert info.value.code == "config"
    assert "bogus" in str(info.value)


def test_zero_noise_scenario_recovers_truth():
    cfg = plnav.default_scenarios()[1]
    cfg.inject_noise = False
    cfg.duration = 20.0
    run = plnav.run_scenario(cfg)
    assert run.ls_report.max_3d < 1e-6
    assert run.fgo_report.max_3d < 1e-3
    costs = run.accepted_costs
    assert all(b < a for a, b in zip(costs, costs[1:]))


def test_noisy_scenario_fgo_beats_ls():
    run = plnav.run_scenario(plnav.default_scenarios(seed=3)[0])
    assert run.fgo_positions.shape == (len(run.fgo_times), 3)
    assert run.fgo_report.mae_3d < run.ls_report.mae_3d
    assert plnav.improvement(run.fgo_report.mae_3d, run.ls_report.mae_3d) > 0


def test_simulate_and_ls():
    cfg = plnav.default_scenarios()[2]
    cfg.duration = 5.0
    ds = plnav.simulate(cfg)
    assert ds.num_epochs == 5
    assert len(ds.imu) == 1000
    fixes = plnav.run_ls(ds)
    assert len(fixes) == 5 and all(f.converged for f in fixes)
    assert ds.truth_positions.shape[1] == 3


def test_monte_carlo_table():
    summaries = plnav.monte_carlo(plnav.default_scenarios()[:2], runs=2, seed0=1)
    assert [s.runs for s in summaries] == [2, 2]
    assert all(s.lm_violations == 0 for s in summaries)
    text = plnav.render_table(plnav.table_rows(summaries))
    assert "GPS+2PL" in text and "FGO" in text
