import os
import sys
from unittest import mock

import pytest


@pytest.fixture(scope="function")
def env_defaults():
    with mock.patch.dict(os.environ, {}, clear=True):
        os.environ["FREE_PRODUCTS_ENGINE_STREAM_CEILING"] = "14"
        os.environ["FREE_PRODUCTS_ENGINE_DIRECT_CEILING"] = "12"
        os.environ["FREE_PRODUCTS_REPORT_PRECISION"] = "12"
        os.environ["FREE_PRODUCTS_REPORT_LOG_LEVEL"] = "warning"

        # Unload the app import so that subsequent tests don't reuse
        if "app" in sys.modules:
            del sys.modules["app"]

        yield
