import numpy as np
import pytest

from conftest import make_frame, ring_from_diffs
from ovc_frontend.core import Corner, Polarity, corner_records, make_config
from ovc_frontend.oracle import oracle_detect, oracle_score_by_sweep, oracle_segment_test
from ovc_frontend.pipeline import detect_corners, random_test_image, stream_frame


def test_flat_frame():
    assert oracle_detect(make_frame(np.full((20, 20), 9)), make_config(0, 1)) == []


def test_single_bright_spot_motif():
    # center darker than all 16 circle points by 150
    img = np.full((40, 40), 200, np.uint8)
    img[17, 22] = 50
    assert oracle_detect(make_frame(img), make_config(20, 4)) == [Corner(22, 17, 150, Polarity.BRIGHT)]


def test_sweep_examples():
    assert oracle_score_by_sweep(*ring_from_diffs(100, [150] * 16)) == 150
    assert oracle_score_by_sweep(*ring_from_diffs(100, [30] * 9 + [5] * 7)) == 30
    assert oracle_score_by_sweep(*ring_from_diffs(100, [30, -30] * 8)) == 0


def test_brute_segment_test_anchor():
    bright, dark = oracle_segment_test(100, [121] * 9 + [100] * 7, 20)
    assert bright and not dark
    bright, dark = oracle_segment_test(100, [121] * 8 + [100] * 8, 20)
    assert not bright and not dark


@pytest.mark.parametrize("size", [(16, 16), (64, 64), (41, 23)])
@pytest.mark.parametrize("t", [0, 20, 60])
def test_pipeline_agrees_with_oracle(size, t):
    for trial in range(4):
        frame = make_frame(random_test_image(11, trial, *size))
        expected = corner_records(oracle_detect(frame, make_config(t, 1))).tobytes()
        assert detect_corners(frame, make_config(t, 4)).tobytes() == expected
        assert stream_frame(frame, make_config(t, 1 + trial % 2 * 7)).tobytes() == expected
