"""Scenario catalog, config round trips, and the batch runners."""

import dataclasses
import json
import math

import pytest
import yaml

from pulseprep import (
    NoiseSpec,
    ScenarioConfig,
    builtin_scenarios,
    run_monte_carlo,
    run_scenario,
    spectral_norm,
)
from pulseprep.io import read_csv_columns, read_spectrum_csv
from pulseprep.model import build_emitter_array
from pulseprep.scenarios import BUILTIN_DESCRIPTIONS, checks_for, make_target

SMOKE = ScenarioConfig(
    name="smoke-single",
    positions_wavelengths=(0.0,),
    arrival_time=4.0,
    t_end=6.0,
    dt=2e-3,
    grid_points=1001,
)


def test_catalog_is_described():
    catalog = builtin_scenarios()
    assert len(catalog) == 12
    assert set(catalog) == set(BUILTIN_DESCRIPTIONS)
    for name, config in catalog.items():
        assert config.name == name


@pytest.mark.parametrize("name", sorted(BUILTIN_DESCRIPTIONS))
def test_yaml_round_trip_builtin(name, tmp_path):
    config = builtin_scenarios()[name]
    path = tmp_path / "scenario.yaml"
    path.write_text(yaml.safe_dump(config.to_dict()))
    assert ScenarioConfig.from_yaml(path) == config


def test_yaml_round_trip_kitchen_sink(tmp_path):
    config = ScenarioConfig(
        name="custom",
        positions_wavelengths=(0.0, 0.25),
        target_kind="explicit",
        target_amplitudes=(0.6 + 0j, 0.8j),
        arrival_time=5.0,
        t_end=9.0,
        gamma_free=0.1,
        grid_half_width=8.0,
        grid_points=801,
        coarse_n=4,
        coarse_extent=(-2.0, 2.0),
        raman_center=5.0,
        raman_width=0.2,
        noise=NoiseSpec(0.1, 0.05, trials=4, seed=9),
        dt=2e-3,
        seed=3,
    )
    path = tmp_path / "scenario.yaml"
    path.write_text(yaml.safe_dump(config.to_dict()))
    assert ScenarioConfig.from_yaml(path) == config


def test_from_dict_defaults():
    config = ScenarioConfig.from_dict(
        {"name": "bare", "positions_wavelengths": [0.0, 0.25]}
    )
    assert config.target_kind == "symmetric"
    assert config.arrival_time == 15.0
    assert config.t_end == 25.0
    assert config.grid_half_width == 10.0
    assert config.grid_points == 2001
    assert config.coarse_n is None
    assert config.raman_center is None
    assert config.noise is None


def test_from_dict_explicit_target():
    config = ScenarioConfig.from_dict(
        {
            "name": "x",
            "positions_wavelengths": [0.0, 0.25],
            "target": {"kind": "explicit", "amplitudes": [[0.6, 0.0], [0.0, 0.8]]},
        }
    )
    assert config.target_kind == "explicit"
    assert config.target_amplitudes == (0.6 + 0j, 0.8j)


def test_make_target_rejections():
    array = build_emitter_array([-0.125, 0.125])
    base = builtin_scenarios()["fig2-symmetric"]
    no_amps = dataclasses.replace(base, target_kind="explicit", target_amplitudes=None)
    with pytest.raises(ValueError, match="needs amplitudes"):
        make_target(no_amps, array)
    with pytest.raises(ValueError, match="unknown target kind"):
        make_target(dataclasses.replace(base, target_kind="bogus"), array)


def test_smoke_run_writes_consistent_files(tmp_path):
    with pytest.warns(UserWarning):
        result = run_scenario(SMOKE, out_dir=tmp_path / "a")
    assert set(result.paths) == {
        "trajectory",
        "input_spectrum",
        "output_spectrum",
        "summary",
    }

    summary = json.loads((tmp_path / "a" / "summary.json").read_text())
    assert summary == result.summary
    assert summary["n_emitters"] == 1
    assert summary["checks"] == []  # not a built-in name
    assert ScenarioConfig.from_dict(summary["config"]) == SMOKE

    cols = read_csv_columns(tmp_path / "a" / "trajectory.csv")
    assert "concurrence" not in cols
    assert math.isclose(cols["fidelity"].max(), summary["peak_fidelity"], rel_tol=1e-9)
    assert math.isclose(
        cols["re_a_1"][-1], result.trajectory.a[-1, 0].real, rel_tol=0, abs_tol=1e-11
    )

    spec = read_spectrum_csv(tmp_path / "a" / "input_spectrum.csv")
    assert spec.grid.half_width == SMOKE.grid_half_width
    assert spec.grid.n_points == SMOKE.grid_points
    assert math.isclose(spectral_norm(spec), 1.0, abs_tol=1e-9)

    # identical rerun, byte for byte
    with pytest.warns(UserWarning):
        run_scenario(SMOKE, out_dir=tmp_path / "b")
    for fname in ("trajectory.csv", "input_spectrum.csv", "output_spectrum.csv", "summary.json"):
        assert (tmp_path / "a" / fname).read_bytes() == (tmp_path / "b" / fname).read_bytes()


def test_checks_for_unknown_scenario_is_empty():
    assert checks_for("nope", {}) == []


def test_checks_for_band_logic():
    good = {"peak_fidelity": 0.90, "concurrence_at_arrival": 0.76}
    checks = checks_for("fig2-symmetric-gamma", good)
    assert [c["name"] for c in checks] == ["peak_fidelity", "concurrence_at_arrival"]
    assert all(c["passed"] for c in checks)

    bad = {"peak_fidelity": 0.80, "concurrence_at_arrival": 0.5}
    assert not any(c["passed"] for c in checks_for("fig2-symmetric-gamma", bad))

    missing = {"peak_fidelity": None, "concurrence_at_arrival": 0.76}
    first = checks_for("fig2-symmetric-gamma", missing)[0]
    assert first["passed"] is False


def test_checks_for_branch_dominance_handles_dark_side():
    s = {
        "peak_fidelity": 0.96,
        "peak_time": 20.0,
        "branch_norms": {"right": 1.0, "left": 0.0},
    }
    checks = {c["name"]: c for c in checks_for("fig3-timed-dicke-10", s)}
    assert checks["branch_dominance"]["value"] == float("inf")
    assert checks["branch_dominance"]["passed"]


def _tiny_mc_config():
    return dataclasses.replace(
        builtin_scenarios()["fig2-symmetric"],
        name="tiny-mc",
        arrival_time=2.5,
        t_end=5.0,
        dt=2e-3,
        grid_points=1001,
        noise=NoiseSpec(0.05, 0.05, trials=3, seed=3),
    )


def test_monte_carlo_worker_count_is_invisible():
    config = _tiny_mc_config()
    with pytest.warns(UserWarning):
        serial = run_monte_carlo(config, jobs=1)
    with pytest.warns(UserWarning):
        parallel = run_monte_carlo(config, jobs=2)
    mc = serial.summary["monte_carlo"]
    assert mc == parallel.summary["monte_carlo"]
    assert mc["trials"] == 3
    assert len(mc["peak_fidelities"]) == 3
    assert mc["checks"] == []
    assert math.isclose(mc["mean_peak_fidelity"], 0.8887, abs_tol=1e-3)


def test_monte_carlo_requires_noise_block():
    with pytest.raises(ValueError, match="no noise block"):
        run_monte_carlo(builtin_scenarios()["fig2-symmetric"])
