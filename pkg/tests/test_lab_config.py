import json

import pytest

from heislab.lab.config import (
    ExperimentConfig, check_resolution, config_hash, from_mapping, load_config, parse_box, parse_grid,
)


def test_parse_grid_and_box():
    assert parse_grid("64x32X16") == (64, 32, 16)
    assert parse_box("1,2.5,3") == (1.0, 2.5, 3.0)
    with pytest.raises(ValueError):
        parse_grid("64x64")
    with pytest.raises(ValueError):
        parse_box("1,2")


@pytest.mark.parametrize("kw", [{"format": "xml"}, {"grid": (8, 8)}, {"box": (1, 1, 0)}])
def test_validation(kw):
    with pytest.raises(ValueError):
        ExperimentConfig(**kw)


def test_load_config_with_overrides(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"experiment": "scaling", "which": "prop1", "grid": "64x64x512",
                             "lambdas": [3, 4, 5, 6], "seed": 3}))
    cfg = load_config(p, seed=7, k=None)
    assert cfg.grid == (64, 64, 512) and cfg.lambdas == (3.0, 4.0, 5.0, 6.0)
    assert cfg.seed == 7 and cfg.k is None


def test_unknown_keys_are_rejected():
    with pytest.raises(ValueError, match="unknown config keys"):
        from_mapping({"experiment": "solve", "tolerance": 1})


def test_hash_ignores_output_path():
    a = ExperimentConfig(experiment="solve", out="a.csv")
    b = a.replace(out="b.csv")
    assert config_hash(a) == config_hash(b)
    assert config_hash(a) != config_hash(a.replace(seed=1))


def test_resolution_rule():
    # N3 >= ceil(8 f R3 / pi)
    check_resolution(512, 0.9, [8**2.5])
    with pytest.raises(ValueError, match="lambda|carrier"):
        check_resolution(64, 3.0, [9.0, 64.0])
