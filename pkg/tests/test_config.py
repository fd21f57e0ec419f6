import copy
import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kspace_westervelt.analysis import write_raw_field
from kspace_westervelt.config import (
    ConfigError,
    RunConfig,
    config_from_dict,
    load_config,
    load_preset,
    parse_config,
    preset_dict,
    preset_names,
)

EXPECTED_PRESETS = {
    "sec3a_1d_homogeneous",
    "sec3a_1d_burst",
    "sec3b_1d_inhomogeneous",
    "sec3c_2d_homogeneous",
    "sec3d_2d_weak_scatterer",
    "sec3d_2d_strong_scatterer",
    "sec3e_2d_attenuation",
    "attenuation_1d_linear",
}


def base() -> dict:
    return preset_dict("sec3a_1d_homogeneous")


def problems_of(raw) -> list[str]:
    with pytest.raises(ConfigError) as info:
        config_from_dict(raw)
    return info.value.problems


def test_all_presets_load():
    assert EXPECTED_PRESETS <= set(preset_names())
    for name in preset_names():
        cfg = load_preset(name)
        assert cfg.name == name
        assert cfg.resolve_dt() > 0


def test_homogeneous_preset_values():
    cfg = load_preset("sec3a_1d_homogeneous")
    bg = cfg.medium.background
    assert (bg.c, bg.rho, bg.beta, bg.delta) == (1500.0, 1000.0, 3.5, 0.0)
    assert cfg.source.p0 == 1e6 and cfg.source.f0 == 2e5
    assert cfg.source.sigma_sq == 1e-10
    assert cfg.probes[0].position == [0.125]


def test_scatterer_presets():
    weak = load_preset("sec3d_2d_weak_scatterer").medium.inclusions[0]
    strong = load_preset("sec3d_2d_strong_scatterer").medium.inclusions[0]
    assert (weak.c, weak.rho, weak.beta, weak.radius) == (1575.0, 1050.0, 4.0, 0.004)
    assert (strong.c, strong.rho, strong.beta) == (3000.0, 2000.0, 4.0)
    homog = load_preset("sec3c_2d_homogeneous")
    assert homog.medium.background.beta == 4.0
    assert homog.build_grid().extent == pytest.approx((0.05, 0.05))
    assert homog.snapshots == [6.23e-6, 9.8e-6, 1.338e-5]


def test_inhomogeneous_preset_slab():
    cfg = load_preset("sec3b_1d_inhomogeneous")
    med = cfg.build_medium()
    x = cfg.build_grid().axis(0)
    assert np.all(med.c[x >= 0] == 2250.0) and np.all(med.c[x < 0] == 1500.0)
    assert np.all(med.rho[x >= 0] == 1200.0) and np.all(med.beta[x >= 0] == 2.0)
    assert cfg.source.x0 == -0.1


def test_unknown_preset():
    with pytest.raises(KeyError):
        load_preset("no_such_thing")


def test_cfl_and_dt_conflict():
    raw = base()
    raw["solver"]["dt"] = 1e-8
    assert any("exactly one of 'cfl' and 'dt'" in p for p in problems_of(raw))
    del raw["solver"]["dt"], raw["solver"]["cfl"]
    assert any("exactly one" in p for p in problems_of(raw))


def test_probe_in_absorber_corner():
    raw = preset_dict("sec3c_2d_homogeneous")
    raw["probes"].append({"name": "corner", "position": [-0.0249, -0.0249]})
    problems = problems_of(raw)
    assert any("'corner'" in p and "absorbing layer" in p for p in problems)


def test_probe_outside_and_wrong_dimension():
    raw = base()
    raw["probes"] = [{"name": "far", "position": [5.0]}, {"name": "flat", "position": [0.0, 0.0]}]
    problems = problems_of(raw)
    assert any("'far'" in p and "outside" in p for p in problems)
    assert any("'flat'" in p and "coordinates" in p for p in problems)


def test_unknown_keys_rejected():
    raw = base()
    raw["solver"]["cfll"] = 0.1
    raw["colour"] = "blue"
    problems = problems_of(raw)
    assert any("solver.cfll" in p for p in problems)
    assert any("colour" in p for p in problems)


def test_all_problems_collected():
    raw = base()
    raw["solver"]["scheme"] = "rk4"
    raw["medium"]["background"]["rho"] = -1.0
    raw["snapshots"] = [1.0]
    raw["absorber"]["thickness"] = 400
    problems = problems_of(raw)
    assert len(problems) >= 4


def test_hash_ignores_name_and_output():
    a = load_preset("sec3a_1d_homogeneous")
    raw = base()
    raw["name"] = "renamed"
    raw["output"] = {"directory": "/tmp/elsewhere"}
    b = config_from_dict(raw)
    assert a.config_hash() == b.config_hash()
    raw["source"]["p0"] = 2e6
    assert config_from_dict(raw).config_hash() != a.config_hash()


def test_round_trip_through_file(tmp_path):
    cfg = load_preset("sec3d_2d_strong_scatterer")
    path = tmp_path / "c.json"
    path.write_text(json.dumps(cfg.to_dict()))
    again = parse_config(path)
    assert again.config_hash() == cfg.config_hash()
    assert load_config(str(path)).name == cfg.name
    assert load_config("sec3d_2d_strong_scatterer").name == cfg.name


def test_invalid_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(ConfigError):
        parse_config(path)


def test_map_file(tmp_path):
    raw = base()
    raw["grid"] = {"n": [64], "dx": [1e-3]}
    raw["probes"] = []
    raw["absorber"]["thickness"] = 8
    c = np.linspace(1400.0, 1600.0, 64)
    write_raw_field(tmp_path / "c.bin", c, dx=[1e-3])
    raw["medium"]["maps"] = {"c": "c.bin"}
    raw["medium"]["c0"] = 1500.0
    (tmp_path / "cfg.json").write_text(json.dumps(raw))
    cfg = parse_config(tmp_path / "cfg.json")
    assert np.array_equal(cfg.build_medium().c, c)
    write_raw_field(tmp_path / "c.bin", c[:32], dx=[1e-3])
    with pytest.raises(ConfigError):
        cfg.build_medium()


def test_resolve_dt():
    cfg = load_preset("sec3d_2d_strong_scatterer")
    assert cfg.resolve_dt() == pytest.approx(0.3 * (1 / 6000) / 3000)
    raw = base()
    del raw["solver"]["cfl"]
    raw["solver"]["dt"] = 2e-8
    assert config_from_dict(raw).resolve_dt() == 2e-8


def test_replace_is_a_copy():
    cfg = load_preset("sec3a_1d_homogeneous")
    other = cfg.replace(name="x")
    assert other.name == "x" and cfg.name == "sec3a_1d_homogeneous"
    assert isinstance(other, RunConfig)


@given(st.floats(0.01, 2.0), st.floats(1e-5, 2e-4))
def test_valid_solver_values_accepted(cfl, t_end):
    raw = base()
    raw["solver"]["cfl"] = cfl
    raw["solver"]["t_end"] = t_end
    raw["snapshots"] = []
    cfg = config_from_dict(copy.deepcopy(raw))
    assert cfg.solver.cfl == cfl


def test_absorber_defaults():
    raw = base()
    del raw["absorber"]
    cfg = config_from_dict(raw)
    assert (cfg.absorber.thickness, cfg.absorber.u0, cfg.absorber.alpha) == (20, 2.0, 0.1)
    assert load_preset("sec3a_1d_homogeneous").absorber.thickness == 40
