import pytest

from madawipol.forms import default_config


@pytest.fixture(scope="session")
def config():
    return default_config()
