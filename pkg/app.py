#!/usr/bin/env python3
"""Run the free products command line with settings loaded from the environment."""

import sys

from free_products.cli import run
from free_products.settings import ApplicationSettings

# Load application settings from env vars.
app_settings = ApplicationSettings()

if __name__ == "__main__":
    sys.exit(run(settings=app_settings))
