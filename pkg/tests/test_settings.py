import os

import pytest
from pydantic import ValidationError

from free_products.settings import ApplicationSettings, EngineSettings, ReportSettings


def test_settings_defaults(env_defaults) -> None:
    del os.environ["FREE_PRODUCTS_ENGINE_STREAM_CEILING"]
    del os.environ["FREE_PRODUCTS_REPORT_PRECISION"]

    settings = ApplicationSettings()

    assert settings.engine.stream_ceiling == 14
    assert settings.engine.direct_ceiling == 12
    assert settings.engine.enumeration_ceiling == 16
    assert settings.report.precision == 12


def test_settings_inputs(env_defaults) -> None:
    os.environ["FREE_PRODUCTS_ENGINE_DIRECT_CEILING"] = "9"
    os.environ["FREE_PRODUCTS_REPORT_LOG_LEVEL"] = "debug"

    settings = ApplicationSettings()

    assert settings.engine.direct_ceiling == 9
    assert settings.report.log_level == "DEBUG"


def test_settings_invalid_ceiling(env_defaults) -> None:
    os.environ["FREE_PRODUCTS_ENGINE_STREAM_CEILING"] = "0"

    with pytest.raises(ValidationError):
        EngineSettings()


def test_settings_invalid_precision(env_defaults) -> None:
    os.environ["FREE_PRODUCTS_REPORT_PRECISION"] = "51"

    with pytest.raises(ValidationError):
        ReportSettings()


def test_settings_invalid_log_level(env_defaults) -> None:
    os.environ["FREE_PRODUCTS_REPORT_LOG_LEVEL"] = "loud"

    with pytest.raises(ValueError) as excinfo:
        ApplicationSettings()

    assert "'log_level' must be a logging level name" in str(excinfo.value)
