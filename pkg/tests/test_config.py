import textwrap

import pytest

from psc_auctions.config import alpha_grid, load_config, parse_config
from psc_auctions.exceptions import ConfigError

GOOD = textwrap.dedent("""\
    name: demo
    model: {name: example1}
    contracts: [posc, plsc]
    alphas: [0.0, 0.5]
    n_samples: 1000
    seed: 3
""")


def test_parse_good_config():
    cfg = parse_config(GOOD)
    assert cfg.name == "demo" and cfg.alphas == [0.0, 0.5] and cfg.seed == 3
    assert cfg.build_model().name == "example1"
    assert cfg.build_utility().is_linear
    assert cfg.build_cost() is None
    assert cfg.config_hash() == parse_config(GOOD + "# trailing comment\n").config_hash()
    assert cfg.config_hash() != parse_config(GOOD.replace("seed: 3", "seed: 4")).config_hash()


@pytest.mark.parametrize("text,field,line", [
    (GOOD.replace("alphas: [0.0, 0.5]", "alphas: [0.0, 1.5]"), "alphas[1]", 4),
    (GOOD.replace("example1", "example9"), "model.name", 2),
    (GOOD.replace("n_samples: 1000", "n_samples: -1"), "n_samples", 5),
    (GOOD + "colour: red\n", "colour", 7),
    (GOOD.replace("[posc, plsc]", "[posc, royalty]"), "contracts[1]", 3),
    (GOOD + "pa: {cost: quadratic, gamma: -1}\n", "pa.gamma", 7),
])
def test_errors_carry_field_and_line(text, field, line):
    with pytest.raises(ConfigError) as info:
        parse_config(text, "demo.yaml")
    assert info.value.field == field
    assert info.value.line == line
    assert f"line {line}" in str(info.value)


def test_invalid_yaml_reports_line():
    with pytest.raises(ConfigError) as info:
        parse_config("model: {name: example1\ncontracts: [posc]\n")
    assert info.value.line is not None


def test_pa_block_builds_cost():
    cfg = parse_config(GOOD.replace("example1", "example2_pa")
                       + "pa: {cost: quadratic, gamma: 0.5, timing: after_value}\n")
    assert cfg.build_cost().gamma == 0.5


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.yaml")


def test_alpha_grid():
    assert alpha_grid(0, 0.9, 0.1) == [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]


def test_shipped_configs_parse():
    from pathlib import Path

    files = sorted((Path(__file__).parents[1] / "configs").glob("*.yaml"))
    assert files
    for f in files:
        load_config(f)
