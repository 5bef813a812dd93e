import os
from pathlib import Path

import numpy as np
import pytest

import ddfc

CONFIGS = Path(os.environ.get("DDFC_CONFIG_DIR", Path(__file__).resolve().parents[2] / "configs"))


def impulse_plant_data(length=60, seed=0):
    rng = np.random.default_rng(seed)
    A = np.array([[0.5]])
    B = np.array([[1.0]])
    C = np.array([[1.0]])
    D = np.zeros((1, 1))
    u = rng.standard_normal((1, length))
    d = rng.standard_normal((1, length))
    y = ddfc.simulate_lti(A, B, B, C, D, np.zeros(1), u, d)
    return A, B, C, ddfc.Dataset(u, d, y, 0.1, "toy")


def test_hankel_layout():
    h = ddfc.hankel(np.array([[1.0, 2, 3, 4]]), 2)
    np.testing.assert_array_equal(h, [[1, 2, 3], [2, 3, 4]])
    with pytest.raises(ValueError):
        ddfc.hankel(np.array([[1.0, 2]]), 3)


def test_excitation_report():
    r = ddfc.persistency_of_excitation(np.zeros((1, 20)), 2)
    assert not r["exciting"]
    assert r["rank"] == 0
    r = ddfc.persistency_of_excitation(np.random.default_rng(1).standard_normal((1, 20)), 3)
    assert r["exciting"] and r["rank"] == 3


def test_pinv_matches_numpy():
    a = np.random.default_rng(2).standard_normal((4, 6))
    p, rank = ddfc.pinv(a)
    assert rank == 4
    np.testing.assert_allclose(p, np.linalg.pinv(a), atol=1e-12)


def test_dc_gain_from_data_matches_model():
    A, B, C, data = impulse_plant_data()
    g_model = ddfc.dc_gain_model(A, B, C)
    assert g_model[0, 0] == pytest.approx(2.0)
    assert ddfc.dc_gain_data(data, 2)[0, 0] == pytest.approx(2.0, rel=1e-9)


def test_response_matches_simulation():
    A, B, C, data = impulse_plant_data()
    rng = np.random.default_rng(3)
    u = rng.standard_normal((1, 8))
    d = rng.standard_normal((1, 8))
    y = ddfc.simulate_lti(A, B, B, C, np.zeros((1, 1)), np.zeros(1), u, d)
    pred = ddfc.data_driven_response(data, u[:, :2], d[:, :2], y[:, :2], u[:, 2:], d[:, 2:], order_bound=1)
    np.testing.assert_allclose(pred, y[:, 2:], atol=1e-9)


def test_predictor_shape():
    _, _, _, data = impulse_plant_data()
    assert ddfc.predictor_matrix(data, 3).shape == (1, 3 * 3 + 2)


def test_allocate_conserves():
    changes, rest = ddfc.allocate(130.0, [
        {"id": "a", "dispatch_MW": 10, "p_max_MW": 50},
        {"id": "b", "dispatch_MW": 15, "p_max_MW": 50},
    ])
    assert changes == [40.0, 35.0]
    assert rest == 55.0


def test_config_errors_map_to_python():
    with pytest.raises(ddfc.ConfigError):
        ddfc.load_config({"schema_version": 99})
    with pytest.raises(ddfc.IoError):
        ddfc.load_config(str(CONFIGS / "missing.json"))


def test_scenario_round_trip(tmp_path):
    path = CONFIGS / "scenario1.json"
    cfg = ddfc.load_config(path)
    assert cfg["period_s"] == 0.1
    data = ddfc.collect(path)
    assert sorted(data) == ["area1", "area2", "area3"]
    assert data["area2"].length == 101
    data["area2"].save(tmp_path / "area2.csv")
    back = ddfc.Dataset.load(tmp_path / "area2.csv")
    np.testing.assert_array_equal(back.u, data["area2"].u)

    run = ddfc.simulate(path, data, tmp_path / "run")
    estimates = {a["area"]: a["estimate_mean_MW"] for a in run["metrics"]["per_area"]}
    assert estimates["area2"] == pytest.approx(60.0, rel=0.02)
    assert run["conservation_violations"] == 0
    assert (tmp_path / "run" / "result.json").exists()
    assert len(run["traces"]["t"]) == 601
