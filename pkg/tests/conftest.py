import pytest
from hypothesis import HealthCheck, settings

from helpers import SAMPLE_ROWS
from ocpm import activities as act
from ocpm.ocel import import_table

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture
def sample():
    return import_table(SAMPLE_ROWS, (act.TECHNICIAN, act.SCHEDULE))
