import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from ovc_frontend.core import Frame, SensorId

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def make_frame(image, frame_id=0, timestamp_ns=0, sensor=SensorId.LEFT):
    return Frame.from_image(np.asarray(image, dtype=np.uint8), sensor, frame_id, timestamp_ns)


def ring_from_diffs(center, diffs):
    """A (center, ring) pair realizing the given difference circle."""
    ring = np.asarray(diffs, dtype=np.int32) + center
    assert ring.min() >= 0 and ring.max() <= 255
    return center, ring.astype(np.uint8)


def noise_image(seed, width, height):
    return np.random.default_rng(seed).integers(0, 256, (height, width), dtype=np.uint8)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
