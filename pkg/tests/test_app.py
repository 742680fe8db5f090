import os

import pytest
from pydantic import ValidationError


def test_app(env_defaults):
    import app

    assert app.app_settings.engine.stream_ceiling == 14
    assert app.app_settings.report.log_level == "WARNING"


def test_app_rejects_bad_log_level(env_defaults):
    os.environ["FREE_PRODUCTS_REPORT_LOG_LEVEL"] = "chatty"

    with pytest.raises(ValidationError):
        import app  # noqa: F401
