# tests/test_config.py
import pytest

from src.config import DEFAULT_SEED, get_config, update_dict


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in ("COURANT_SEED", "COURANT_WORKERS", "COURANT_LOG_LEVEL"):
        monkeypatch.delenv(name, raising=False)


def test_defaults():
    config = get_config()
    assert config["sampling"]["seed"] == DEFAULT_SEED
    assert config["sampling"]["max_degree"] == 2
    assert config["checks"]["workers"] == 4
    assert config["logging"]["level"] == "WARNING"
    assert config["report"]["color"] is True


def test_yaml_and_argument_overrides(tmp_path):
    config = get_config("sampling:\n  seed: 7\n  max_degree: 1\n")
    assert config["sampling"]["seed"] == 7
    assert config["sampling"]["max_degree"] == 1

    path = tmp_path / "setting.yaml"
    path.write_text("checks:\n  workers: 2\n", encoding="utf-8")
    config = get_config(str(path), {"checks": {"workers": 3}, "sampling": {}})
    assert config["checks"]["workers"] == 3


def test_environment(monkeypatch):
    monkeypatch.setenv("COURANT_SEED", "11")
    monkeypatch.setenv("COURANT_LOG_LEVEL", "debug")
    config = get_config()
    assert config["sampling"]["seed"] == 11
    assert config["logging"]["level"] == "DEBUG"
    # an explicit seed wins over the environment
    assert get_config(None, {"sampling": {"seed": 3}})["sampling"]["seed"] == 3


@pytest.mark.parametrize(
    "override",
    [
        {"sampling": {"seed": -1}},
        {"sampling": {"max_degree": "two"}},
        {"checks": {"workers": 0}},
        {"logging": {"level": "LOUD"}},
    ],
)
def test_invalid_values(override):
    with pytest.raises(ValueError):
        get_config(None, override)


def test_invalid_environment(monkeypatch):
    monkeypatch.setenv("COURANT_SEED", "abc")
    with pytest.raises(ValueError):
        get_config()


def test_update_dict_ignores_unknown_keys():
    target = {"a": {"b": 1}}
    update_dict(target, {"a": {"b": 2, "c": 3}, "d": 4})
    assert target == {"a": {"b": 2}}
