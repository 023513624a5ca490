import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from frarir import SimulationConfig


@pytest.fixture(scope="session")
def config():
    return SimulationConfig()
