import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import make_frame, noise_image, ring_from_diffs
from ovc_frontend.core import GeometryOverflow, Polarity, make_config
from ovc_frontend.detector import (ScoreMap, StreamingDetector, corner_score, corner_score_many,
                                   detect_frame, ring_offsets, segment_test, segment_test_many)
from ovc_frontend.oracle import circle_points, oracle_score_by_sweep
from ovc_frontend.sensor_sim import corner_motif

rings = arrays(np.uint8, 16)
intensities = st.integers(0, 255)
thresholds = st.integers(0, 254)


# -- ring geometry --------------------------------------------------------------------


def test_ring_matches_enumerated_circle():
    # lattice points at rounded radius 3 in a 7x7 window, clockwise from the top
    assert list(ring_offsets()) == circle_points()
    assert ring_offsets()[0] == (0, -3)
    assert len(ring_offsets()) == 16


def test_ring_symmetries():
    pts = set(ring_offsets())
    assert len(pts) == 16
    assert all(abs(dx) <= 3 and abs(dy) <= 3 for dx, dy in pts)
    assert {(-dx, -dy) for dx, dy in pts} == pts
    assert {(-dy, dx) for dx, dy in pts} == pts


# -- segment test and score -------------------------------------------------------------


def test_flat_patch_is_not_a_candidate():
    assert segment_test(100, [100] * 16, 20) is None
    assert corner_score(100, [100] * 16) == (0, None)


def test_uniform_bright_ring():
    assert segment_test(50, [200] * 16, 20) is Polarity.BRIGHT
    assert corner_score(50, [200] * 16) == (150, Polarity.BRIGHT)


def test_eight_dark_entries_are_not_enough():
    ring = [100] * 8 + [200] * 8
    assert segment_test(200, ring, 20) is None
    for start in range(16):
        assert segment_test(200, np.roll(ring, start), 20) is None


def test_nine_vs_eight_contiguous():
    for start in range(16):
        nine = np.roll([180] * 9 + [100] * 7, start)
        eight = np.roll([180] * 8 + [100] * 8, start)
        assert segment_test(100, nine, 20) is Polarity.BRIGHT
        assert segment_test(100, eight, 20) is None


def test_mixed_arc_score():
    center, ring = ring_from_diffs(100, [30] * 9 + [5] * 7)
    # brute force: every start, every length >= 9, all entries positive
    d = ring.astype(int) - center
    best = max(min(d[(s + k) % 16] for k in range(n))
               for s in range(16) for n in range(9, 17)
               if all(d[(s + k) % 16] > 0 for k in range(n)))
    assert best == 30
    assert corner_score(center, ring) == (30, Polarity.BRIGHT)
    assert oracle_score_by_sweep(center, ring) == 30


def test_uniform_dark_ring():
    center, ring = ring_from_diffs(200, [-40] * 16)
    assert corner_score(center, ring) == (40, Polarity.DARK)


def test_wraparound_arc_counts():
    ring = [180] * 5 + [100] * 7 + [180] * 4  # 9 bright entries across the wrap
    assert segment_test(100, ring, 20) is Polarity.BRIGHT


@given(intensities, rings, thresholds)
def test_candidate_iff_score_above_threshold(center, ring, t):
    score, pol = corner_score(center, ring)
    got = segment_test(center, ring, t)
    assert (got is not None) == (score > t)
    if got is not None:
        assert got == pol


@given(intensities, rings)
def test_score_matches_sweep(center, ring):
    assert corner_score(center, ring)[0] == oracle_score_by_sweep(center, ring)


def test_score_matches_sweep_on_small_alphabet():
    alphabet = np.array([0, 128, 255], np.uint8)
    rng = np.random.default_rng(5)
    centers = rng.choice(alphabet, 3000)
    ring = rng.choice(alphabet, (3000, 16))
    score, _ = corner_score_many(centers, ring)
    assert np.array_equal(score, oracle_score_by_sweep(centers, ring))


@given(intensities, rings, thresholds, thresholds)
def test_threshold_monotonicity(center, ring, t1, t2):
    lo, hi = sorted((t1, t2))
    if segment_test(center, ring, hi) is not None:
        assert segment_test(center, ring, lo) is not None


def test_vectorized_matches_scalar(rng):
    centers = rng.integers(0, 256, 500)
    ring = rng.integers(0, 256, (500, 16))
    codes = segment_test_many(centers, ring, 15)
    for c, r, code in zip(centers, ring, codes):
        got = segment_test(int(c), r, 15)
        assert (code < 0) == (got is None)


# -- streaming and batch detection --------------------------------------------------------


def test_no_emission_before_seven_rows():
    img = noise_image(1, 32, 16)
    det = StreamingDetector(32, 16, make_config(0, 4))
    groups = list(det.lane_groups(make_frame(img)))
    emitted = []
    for g in groups[:6 * det.groups_per_row]:
        emitted += det.push_pixels(g)
    assert emitted == []
    assert all(r.y < 3 and not r.scores.any() for r in det.take_rows())


def test_flat_image_yields_nothing():
    frame = make_frame(np.full((64, 64), 77))
    det = StreamingDetector(64, 64, make_config(20, 4))
    out = [c for g in det.lane_groups(frame) for c in det.push_pixels(g)]
    assert out == []
    assert not detect_frame(frame, make_config(20, 4)).scores.any()


def test_overflow_and_group_size():
    frame = make_frame(noise_image(2, 8, 7))
    det = StreamingDetector(8, 7, make_config(20, 4))
    with pytest.raises(ValueError):
        det.push_pixels([1, 2, 3])
    for g in det.lane_groups(frame):
        det.push_pixels(g)
    assert det.done
    with pytest.raises(GeometryOverflow):
        det.push_pixels([0, 0, 0, 0])


def _stream_scores(frame, config):
    det = StreamingDetector(frame.width, frame.height, config)
    emitted, rows = [], []
    for g in det.lane_groups(frame):
        emitted += det.push_pixels(g)
        rows += det.take_rows()
    return emitted, rows


def test_lane_width_does_not_change_emissions():
    frame = make_frame(noise_image(3, 64, 64))
    results = [sorted(_stream_scores(frame, make_config(20, lanes))[0]) for lanes in (1, 2, 4, 8)]
    assert results[0] and all(r == results[0] for r in results)


@given(st.integers(7, 29), st.integers(7, 20), st.sampled_from([1, 2, 4, 8]),
       st.integers(0, 80), st.integers(0, 2**32 - 1))
def test_streaming_equals_batch(width, height, lanes, t, seed):
    frame = make_frame(noise_image(seed, width, height))
    config = make_config(t, lanes)
    emitted, rows = _stream_scores(frame, config)
    batch = detect_frame(frame, config)
    assert [r.y for r in rows] == list(range(height))
    streamed = ScoreMap(np.stack([r.scores for r in rows]), np.stack([r.polarity for r in rows]))
    assert streamed == batch
    assert emitted == batch.candidates()


def test_candidate_emitted_before_row_plus_four():
    frame = make_frame(noise_image(4, 37, 30))
    det = StreamingDetector(37, 30, make_config(10, 2))
    for g in det.lane_groups(frame):
        for c in det.push_pixels(g):
            assert det.pixels_consumed <= (c.y + 4) * frame.width
            # and not before its window is complete
            assert det.pixels_consumed >= (c.y + 3) * frame.width + c.x + 4


def test_motif_scores_at_center():
    img = np.full((64, 64), 220, np.uint8)
    img[28:35, 28:35] = corner_motif(220, 40)
    scores = detect_frame(make_frame(img), make_config(20, 4))
    assert scores.scores[31, 31] == 180
    assert scores.polarity[31, 31] == Polarity.BRIGHT
    assert np.count_nonzero(scores.scores) == 1


@given(st.integers(0, 2**32 - 1), st.integers(7, 40), st.integers(7, 40))
def test_border_is_always_zero(seed, w, h):
    s = detect_frame(make_frame(noise_image(seed, w, h)), make_config(0, 1)).scores
    assert not s[:3].any() and not s[-3:].any()
    assert not s[:, :3].any() and not s[:, -3:].any()


@given(st.integers(0, 2**32 - 1), st.integers(0, 60))
def test_rotation_maps_candidates(seed, t):
    img = noise_image(seed, 23, 17)
    cfg = make_config(t, 1)
    base = detect_frame(make_frame(img), cfg).scores
    rotated = detect_frame(make_frame(np.rot90(img)), cfg).scores
    assert np.array_equal(np.rot90(base), rotated)


def test_exhaustive_binary_rings():
    # every ring over {0, 255} with center 128: 2**16 cases
    bits = np.array(list(itertools.product([0, 255], repeat=16)), dtype=np.uint8)
    score, code = corner_score_many(128, bits)
    runs = segment_test_many(128, bits, 0)
    assert np.array_equal(score > 0, runs >= 0)
    assert set(np.unique(score)) == {0, 127, 128}
