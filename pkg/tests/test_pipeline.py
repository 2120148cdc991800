import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import make_frame, noise_image
from ovc_frontend.core import SensorRigConfig, as_corners, make_config
from ovc_frontend.oracle import oracle_detect
from ovc_frontend.pipeline import (StreamTrace, detect_corners, random_test_image, run_bench,
                                   run_stream, stream_frame, verify)
from ovc_frontend.transport import decode_bundle_records


@given(st.integers(7, 40), st.integers(7, 30), st.sampled_from([1, 2, 4, 8]),
       st.integers(0, 80), st.integers(0, 2**32 - 1))
def test_stream_and_batch_match_oracle(width, height, lanes, t, seed):
    frame = make_frame(noise_image(seed, width, height))
    config = make_config(t, lanes)
    want = oracle_detect(frame, config)
    assert as_corners(stream_frame(frame, config)) == want
    assert as_corners(detect_corners(frame, config)) == want


def test_trace_records_every_emission():
    frame = make_frame(noise_image(9, 40, 30))
    trace = StreamTrace()
    out = stream_frame(frame, make_config(10, 4), trace)
    assert len(trace.corners) == len(out) > 0
    assert trace.score_rows == list(range(30))
    assert len(trace.candidates) >= len(out)


def test_random_test_image_is_seeded():
    a = random_test_image(1, 5, 33, 21)
    assert a.shape == (21, 33) and a.dtype == np.uint8
    assert np.array_equal(a, random_test_image(1, 5, 33, 21))
    assert not np.array_equal(a, random_test_image(2, 5, 33, 21))
    assert set(np.unique(random_test_image(1, 1, 33, 21))) <= {0, 128, 255}


def test_verify_counts_checks():
    report = verify(5, 3, [(20, 18)], thresholds=(0, 30), lanes=(1, 8))
    assert report.passed
    assert (report.frames, report.checks) == (3, 6)


def test_verify_flags_a_broken_pipeline():
    report = verify(5, 2, [(40, 40)], pipeline=lambda f, c: stream_frame(f, c)[::2])
    assert not report.passed
    m = report.mismatches[0]
    assert m.got < m.expected
    assert m.reproducer().startswith("ovc-frontend verify --seed 5 --only-trial 0")


def test_run_stream_keeps_decodable_bundles():
    rig = SensorRigConfig(width=64, height=48, seed=3)
    report, bundles = run_stream(rig, make_config(20, 4), 0.5, ring_capacity=64,
                                 keep_bundles=True)
    assert report.frames_processed == 10 and report.imu_samples == 100
    assert report.drops == 0 and len(bundles) == 20
    total = 0
    for i, data in enumerate(bundles):
        frame, records = decode_bundle_records(data)
        assert (frame.frame_id, int(frame.sensor_id)) == (i // 2, i % 2)
        assert as_corners(records) == oracle_detect(frame, make_config(20, 1))
        total += len(records)
    assert total == report.corners_total


def test_small_ring_drops_but_conserves():
    rig = SensorRigConfig(width=64, height=48)
    report, _ = run_stream(rig, make_config(20, 4), 1.0, ring_capacity=1)
    assert report.bundles_consumed + report.drops == 40


def test_bench_with_supplied_image():
    image = noise_image(1, 80, 60)
    report = run_bench(5, make_config(20, 2), image=image)
    per_frame = len(detect_corners(make_frame(image), make_config(20, 2)))
    assert report.corners_total == 10 * per_frame
    assert report.frames_per_second > 0
    assert "frame pairs: 5" in report.summary()


@pytest.mark.parametrize("lanes", [1, 8])
def test_non_lane_aligned_width(lanes):
    frame = make_frame(noise_image(4, 257, 13))
    assert as_corners(stream_frame(frame, make_config(0, lanes))) == \
        oracle_detect(frame, make_config(0, lanes))
