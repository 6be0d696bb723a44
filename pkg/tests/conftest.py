import pytest

from parsers.config_parser import validate_config

# Primer sa eksponencijalnim opadanjem: θ=0.5, ϑ=0.3, a1=5, a2=0.4, s=5, p=5, λ=1
EXAMPLE1 = {
    "L": 1.0,
    "T": 100.0,
    "N_nodes": 250,
    "dt": 1e-3,
    "theta": 0.5,
    "vartheta": 0.3,
    "a1": 5.0,
    "a2": 0.4,
    "s_delay": 5.0,
    "p": 5.0,
    "lambda": 1.0,
}

# Mali problem za brze testove integratora
SMALL = dict(EXAMPLE1, N_nodes=8, T=0.05, s_delay=0.01, M_xi=20)


@pytest.fixture
def make_config():
    def _make(base=None, **overrides):
        raw = dict(EXAMPLE1 if base is None else base)
        raw.update(overrides)
        return validate_config(raw)
    return _make


@pytest.fixture
def small_config(make_config):
    def _make(**overrides):
        return make_config(SMALL, **overrides)
    return _make
