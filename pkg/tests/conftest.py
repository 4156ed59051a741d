"""
Shared fixtures
"""

import pytest
import structlog


@pytest.fixture(autouse=True)
def reset_logging():
    yield
    structlog.reset_defaults()
