import math

import pytest
from pydantic import ValidationError

from app.core.config import get_settings
from app.core.errors import UsageError
from app.schemas.experiment import ExperimentConfig, OutputFormat, grid, parse_grid
from app.schemas.models import ModelKind, ModelSpec
from app.services.experiments import EXPERIMENTS, resolve_config


def test_settings_defaults_and_env(monkeypatch):
    settings = get_settings()
    assert settings.LAB_SEED == 7
    assert settings.LAB_REPLICAS == 10_000
    assert settings.CONFIDENCE_MULTIPLIER == 3.0
    monkeypatch.setenv("LAB_SEED", "99")
    get_settings.cache_clear()
    assert get_settings().LAB_SEED == 99


def test_config_text_form_is_lossless():
    config = ExperimentConfig(
        experiment="constant-rate",
        x=0.1,
        y=1 / 3,
        lam=1.0,
        times=[0.1, 0.2, 0.30000000000000004],
        t=math.inf,
        replicas=250,
        format=OutputFormat.CSV,
        check=True,
    )
    text = config.to_text()
    assert "t = inf" in text
    assert "check = true" in text
    assert ExperimentConfig.from_text(text) == config


def test_config_file_comments_and_errors():
    values = ExperimentConfig.parse_text("# comment\n\nx = 2.5\ntimes = 0:1:0.5\n")
    assert values == {"x": "2.5", "times": "0:1:0.5"}
    with pytest.raises(ValueError):
        ExperimentConfig.parse_text("no equals sign here")


def test_config_validation():
    with pytest.raises(ValidationError):
        ExperimentConfig(experiment="fig2", times=[1.0, 0.5])
    with pytest.raises(ValidationError):
        ExperimentConfig(experiment="fig2", replicas=1)
    with pytest.raises(ValidationError):
        ExperimentConfig(experiment="fig2", unknown_key=1)


def test_grids():
    assert grid(0.0, 1.0, 0.25) == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert len(grid(0.05, 0.95, 0.001)) == 901
    assert parse_grid("0.5, 1, 3") == [0.5, 1.0, 3.0]
    assert parse_grid("0:10:0.25")[-1] == 10.0
    with pytest.raises(ValueError):
        parse_grid("0:1")


def test_resolution_order(monkeypatch):
    monkeypatch.setenv("LAB_SEED", "42")
    get_settings.cache_clear()
    config = resolve_config("fig2", {"replicas": "500", "x": "3.0"}, {"x": 4.0, "seed": None})
    assert config.seed == 42
    assert config.replicas == 500
    assert config.x == 4.0
    assert config.y == EXPERIMENTS["fig2"].defaults["y"]
    assert config.times[0] == 0.0 and config.times[-1] == 10.0


def test_config_file_may_spell_lambda():
    config = resolve_config("constant-rate", {"lambda": "2.0"}, {})
    assert config.lam == 2.0


def test_resolution_errors():
    with pytest.raises(UsageError):
        resolve_config("fig9", {}, {})
    with pytest.raises(UsageError):
        resolve_config("fig2", {"replicas": "zero"}, {})


def test_model_spec_parameters():
    assert ModelSpec.tcp_variable().kind is ModelKind.TCP_VARIABLE
    assert ModelSpec.model_validate({"kind": "tcp-constant", "lambda": 2.0}).lam == 2.0
    with pytest.raises(ValidationError):
        ModelSpec(kind=ModelKind.TCP_CONSTANT)
    with pytest.raises(ValidationError):
        ModelSpec(kind=ModelKind.TCP_VARIABLE, alpha=1.0)
    with pytest.raises(ValidationError):
        ModelSpec.storage(1.0, 0.0)
