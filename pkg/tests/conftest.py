import pytest

from .mocklib import build_mock_library


@pytest.fixture(scope="session")
def mock_library():
    return build_mock_library()
