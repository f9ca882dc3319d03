from fractions import Fraction

import pytest

from config.settings import (
    RunConfig,
    build_run_config,
    env_overrides,
    load_yaml,
    parse_cartan,
    parse_complex,
    parse_float_list,
    parse_range,
    parse_scalar,
)
from errors import ConfigError


@pytest.mark.parametrize("text,expected", [
    ("-0.5+1i", complex(-0.5, 1.0)),
    ("2i", 2j),
    ("-i", -1j),
    ("3", 3 + 0j),
])
def test_parse_complex(text, expected):
    assert parse_complex(text) == expected


def test_parse_complex_rejects_garbage():
    with pytest.raises(ConfigError):
        parse_complex("one")


def test_parse_scalar_keeps_rationals_exact():
    assert parse_scalar("1/2") == Fraction(1, 2)
    assert parse_scalar(0.5) == Fraction(1, 2)
    assert isinstance(parse_scalar(3), Fraction)
    assert parse_scalar(0.3) == 0.3
    assert parse_scalar("-0.5+1i") == complex(-0.5, 1.0)
    assert parse_scalar("2+0i") == Fraction(2)


@pytest.mark.parametrize("text,expected", [
    ("0..3", [0, 1, 2, 3]),
    ("-3:3", list(range(-3, 4))),
    ("-2..2", [-2, -1, 0, 1, 2]),
    ("5", [5]),
    ("-1", [-1]),
])
def test_parse_range(text, expected):
    assert parse_range(text) == expected


@pytest.mark.parametrize("text", ["3..1", "a..b", "x"])
def test_parse_range_errors(text):
    with pytest.raises(ConfigError):
        parse_range(text)


def test_parse_lists():
    assert parse_float_list("0.25,0.5,1") == [0.25, 0.5, 1.0]
    assert parse_cartan("0,1.5,3.1") == (0.0, 1.5, 3.1)
    with pytest.raises(ConfigError):
        parse_cartan("1,2")
    with pytest.raises(ConfigError):
        parse_float_list("1,x")


@pytest.mark.parametrize("kwargs", [
    {'dim': 4},
    {'tolerance': 0.0},
    {'format': 'xml'},
    {'log_level': 'LOUD'},
])
def test_run_config_validation(kwargs):
    with pytest.raises(ConfigError):
        RunConfig(**kwargs)


def test_missing_explicit_config_file(tmp_path):
    with pytest.raises(ConfigError):
        load_yaml(str(tmp_path / "absent.yaml"))


def test_invalid_yaml(tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text("run: [unclosed\n")
    with pytest.raises(ConfigError):
        load_yaml(str(path))


def test_env_overrides():
    overrides = env_overrides({'SU11_DIM': '48', 'SU11_FORMAT': 'csv', 'OTHER': 'x'})
    assert overrides == {'dim': 48, 'format': 'csv'}
    with pytest.raises(ConfigError):
        env_overrides({'SU11_SEED': 'seven'})


def test_layering_yaml_env_flags(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text(
        "run:\n  dim: 24\n  seed: 3\n"
        "verifier:\n  tolerances:\n    legendre: 1.0e-10\n    c_recurrence: 0.0\n"
        "grids:\n  addition:\n    labels: [['1/2', '1/2'], ['-0.5+1i', 0]]\n"
    )
    config = build_run_config(str(path), {'seed': None}, environ={'SU11_DIM': '40'})
    assert config.dim == 40
    assert config.seed == 3
    assert config.verifier['tolerances']['legendre'] == 1e-10
    assert config.grids['addition']['labels'] == [(Fraction(1, 2), Fraction(1, 2)),
                                                  (complex(-0.5, 1.0), Fraction(0))]

    flagged = build_run_config(str(path), {'tolerance': 1e-6, 'dim': 16},
                               {'legendre': {'tau': [0, 1]}}, environ={'SU11_DIM': '40'})
    assert flagged.dim == 16
    assert flagged.verifier['tolerances'] == {'c_recurrence': 0.0}
    assert flagged.runner_config()['verifier']['tolerance'] == 1e-6
    assert flagged.grids['legendre'] == {'tau': [0, 1]}


def test_default_config_file_loads():
    config = build_run_config(None, {}, environ={})
    assert config.dim == 32
    assert config.thresholds['default']['action'] == 'block'
    assert config.verifier['f_convention'] == 'series'


def test_invalid_flag_value():
    with pytest.raises(ConfigError):
        build_run_config(None, {'dim': 'many'}, environ={})
