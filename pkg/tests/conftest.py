import os
import sys

import pytest


SRC_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "src")
if SRC_DIR not in sys.path:
    sys.path.insert(0, SRC_DIR)

from gauge_fields import MagneticSetup  # noqa: E402


@pytest.fixture
def setup():
    return MagneticSetup()


@pytest.fixture
def clean_env(monkeypatch):
    for name in list(os.environ):
        if name.startswith("LANDAU_"):
            monkeypatch.delenv(name, raising=False)
    return monkeypatch
