"""
Tests for resource limits
"""

# Third Party
import pytest

# Local
from hydra.config import LIMIT_ENV_VARS, Limits
from hydra.errors import ValidationError

## Happy Path ##################################################################


def test_defaults():
    """Defaults are generous but finite"""
    limits = Limits()
    assert limits.max_nodes == 10**6
    assert limits.max_powerset_base == 20
    assert limits.max_numeral == 4096
    assert limits.max_exponential == 2**16


def test_from_env(monkeypatch):
    """Environment variables override the defaults"""
    monkeypatch.setenv("HYDRA_MAX_NODES", "50")
    monkeypatch.setenv("HYDRA_MAX_NUMERAL", "7")
    limits = Limits.from_env()
    assert limits.max_nodes == 50
    assert limits.max_numeral == 7
    assert limits.max_powerset_base == 20


def test_overrides_win_over_env(monkeypatch):
    """Explicit values beat the environment; None is ignored"""
    monkeypatch.setenv("HYDRA_MAX_NODES", "50")
    limits = Limits.from_env(max_nodes=9, max_numeral=None)
    assert limits.max_nodes == 9
    assert limits.max_numeral == 4096


def test_env_var_names():
    """Every limit has an environment variable"""
    assert set(LIMIT_ENV_VARS) == {
        "max_nodes",
        "max_powerset_base",
        "max_numeral",
        "max_exponential",
    }


## Error Cases #################################################################


def test_invalid_env_value(monkeypatch):
    """Non-integer environment values are rejected"""
    monkeypatch.setenv("HYDRA_MAX_POWERSET_BASE", "lots")
    with pytest.raises(ValidationError, match="HYDRA_MAX_POWERSET_BASE"):
        Limits.from_env()


def test_negative_limit():
    """Limits are non-negative"""
    with pytest.raises(ValidationError):
        Limits(max_nodes=-1)
