import math

import pytest

from analysis.regime import (
    admissible_v_interval,
    check_a1_condition,
    check_a2_condition,
    damping_product,
    default_v_weight,
)
from models.simulation_config import BConvention
from parsers.config_parser import ConfigError, ConfigParser, validate_config

from conftest import EXAMPLE1


def test_example_config_is_valid(make_config):
    cfg = make_config()
    assert cfg.m_delay == 5000
    assert cfg.n_steps == 100000
    assert cfg.lambda_ == 1.0
    assert cfg.b_convention == BConvention.SECTION2
    assert cfg.fit_start == 10.0


def test_fractional_order_out_of_range(make_config):
    with pytest.raises(ConfigError, match="fractional order out of range"):
        make_config(theta=1.2)


def test_delay_not_multiple_of_dt(make_config):
    with pytest.raises(ConfigError, match="delay not a multiple of dt"):
        make_config(s_delay=5.0, dt=0.3)


@pytest.mark.parametrize("key,value", [("p", 2.0), ("L", 0.0), ("T", -1.0), ("dt", 0.0), ("N_nodes", 2)])
def test_rejects_out_of_domain_values(make_config, key, value):
    with pytest.raises(ConfigError):
        make_config(**{key: value})


def test_rejects_unknown_and_missing_keys():
    with pytest.raises(ConfigError, match="unknown keys"):
        validate_config(dict(EXAMPLE1, colour="blue"))
    raw = dict(EXAMPLE1)
    del raw["lambda"]
    with pytest.raises(ConfigError, match="missing required keys: lambda"):
        validate_config(raw)


def test_validation_is_idempotent(make_config):
    cfg = make_config(b_convention="section7", decay_fit_start="12.5", source_on="false")
    assert validate_config(cfg.to_dict()) == cfg


def test_parse_text_reports_line_numbers():
    parser = ConfigParser()
    with pytest.raises(ConfigError) as info:
        parser.parse_text("L = 1\nthis is not a pair\n")
    assert info.value.line == 2
    assert "line 2" in str(info.value)

    with pytest.raises(ConfigError) as info:
        parser.parse_text("# header\nL = 1\n\nL = 2\n")
    assert info.value.line == 4


def test_format_config_round_trip(make_config):
    cfg = make_config(dt=2.5e-4, M_xi=123)
    parser = ConfigParser()
    assert validate_config(parser.parse_text(ConfigParser.format_config(cfg))) == cfg


def test_a1_condition_examples(make_config):
    assert check_a1_condition(make_config())
    assert not check_a1_condition(make_config(a1=1.0, a2=2.0))
    assert check_a1_condition(make_config(vartheta=1.0, a1=3.0, a2=0.0))


def test_preamble_damping_does_not_satisfy_a1(make_config):
    assert not check_a1_condition(make_config(a1=1.0, a2=0.08))


def test_admissible_v_interval(make_config):
    lo, hi = admissible_v_interval(make_config())
    assert lo == pytest.approx(2.0257, abs=1e-4)
    assert hi == pytest.approx(2.9743, abs=1e-4)
    assert admissible_v_interval(make_config(a1=0.0, a2=0.0)) is None


def test_v_interval_boundary_is_empty(make_config):
    cfg = make_config(a2=0.4)
    a1 = cfg.a2 + 2.0 * damping_product(cfg)
    boundary = make_config(a1=a1, a2=0.4)
    assert not check_a1_condition(boundary)
    interval = admissible_v_interval(boundary)
    assert interval is None or interval[1] - interval[0] < 1e-12


@pytest.mark.parametrize("theta", [0.2, 0.5, 0.8])
@pytest.mark.parametrize("vartheta", [0.3, 1.0, 2.5])
@pytest.mark.parametrize("a1,a2", [(0.5, 0.1), (3.0, 0.0), (5.0, 0.4), (10.0, 3.0), (1.0, 2.0)])
def test_a1_iff_nonempty_interval(make_config, theta, vartheta, a1, a2):
    cfg = make_config(theta=theta, vartheta=vartheta, a1=a1, a2=a2)
    assert check_a1_condition(cfg) == (admissible_v_interval(cfg) is not None)


@pytest.mark.parametrize("theta,vartheta", [(0.5, 0.3), (0.3, 1.0), (0.7, 2.0), (0.1, 0.5)])
def test_b_times_A0_identity(make_config, theta, vartheta):
    cfg = make_config(theta=theta, vartheta=vartheta)
    assert damping_product(cfg) == pytest.approx(vartheta ** (theta - 1.0), rel=1e-12)


def test_section7_convention_scales_b_by_a1(make_config):
    cfg2 = make_config(a1=5.0)
    cfg7 = make_config(a1=5.0, b_convention="section7")
    assert cfg7.b_coeff == pytest.approx(5.0 * cfg2.b_coeff)
    assert cfg2.b_coeff == pytest.approx(1.0 / math.pi)


def test_a2_condition_examples(make_config):
    assert not check_a2_condition(make_config(a2=0.4))
    assert check_a2_condition(make_config(a2=2.0))
    assert not check_a2_condition(make_config(vartheta=1.0, theta=0.3, a2=1.0))


def test_default_v_weight_requires_interval(make_config):
    assert default_v_weight(make_config()) == pytest.approx(2.5)
    with pytest.raises(ValueError, match="empty"):
        default_v_weight(make_config(a1=1.0, a2=2.0))


def test_mode_cutoff_defaults_and_none(make_config):
    cfg = make_config()
    assert cfg.mode_cutoff == 2.0
    assert cfg.mode_filter_stride == 1000
    assert cfg.omega_cutoff == pytest.approx(2000.0)

    off = make_config(mode_cutoff="none")
    assert off.mode_cutoff is None
    assert off.omega_cutoff is None
    assert validate_config(off.to_dict()) == off


@pytest.mark.parametrize("key,value", [("mode_cutoff", 0.0), ("mode_cutoff", -1.0), ("mode_filter_stride", -1)])
def test_rejects_bad_mode_filter_settings(make_config, key, value):
    with pytest.raises(ConfigError, match=key):
        make_config(**{key: value})
