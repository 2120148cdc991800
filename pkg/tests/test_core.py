import dataclasses

import numpy as np
import pytest

from ovc_frontend.core import (BadLaneWidth, BadThreshold, ConfigError, Corner, DetectorConfig,
                               DimensionTooSmall, Frame, LengthMismatch, Polarity, SensorId,
                               as_corners, corner_records, make_config, validate_frame)


def test_full_resolution_frame_is_valid():
    frame = Frame(SensorId.LEFT, 0, 0, 1280, 1024, np.zeros(1280 * 1024, np.uint8))
    validate_frame(frame)
    assert frame.pixels.size == 1_310_720


def test_six_by_six_is_too_small():
    with pytest.raises(DimensionTooSmall):
        validate_frame(Frame(SensorId.LEFT, 0, 0, 6, 6, np.zeros(36, np.uint8)))


def test_pixel_count_mismatch():
    with pytest.raises(LengthMismatch):
        validate_frame(Frame(SensorId.LEFT, 0, 0, 8, 8, np.zeros(63, np.uint8)))


def test_frame_pixels_are_read_only_and_compare_by_value():
    src = np.arange(64, dtype=np.uint8).reshape(8, 8)
    a = Frame.from_image(src, frame_id=3)
    with pytest.raises(ValueError):
        a.pixels[0] = 1
    src[0, 0] = 99  # the caller keeps write access to its own buffer
    b = Frame.from_image(np.arange(64, dtype=np.uint8).reshape(8, 8), frame_id=3)
    b2 = Frame.from_image(np.arange(64, dtype=np.uint8).reshape(8, 8), frame_id=4)
    assert b != b2
    assert a.image.shape == (8, 8)


@pytest.mark.parametrize("threshold,lanes", [(20, 4), (0, 1), (254, 8), (7, 2)])
def test_make_config_accepts(threshold, lanes):
    cfg = make_config(threshold, lanes)
    assert (cfg.threshold, cfg.lane_width) == (threshold, lanes)
    assert (cfg.ring_size, cfg.min_arc, cfg.window) == (16, 9, 7)


@pytest.mark.parametrize("threshold", [300, 255, -1])
def test_make_config_rejects_threshold(threshold):
    with pytest.raises(BadThreshold):
        make_config(threshold, 4)


@pytest.mark.parametrize("lanes", [0, 3, 16])
def test_make_config_rejects_lanes(lanes):
    with pytest.raises(BadLaneWidth):
        make_config(20, lanes)


def test_fixed_constants_cannot_change():
    cfg = make_config()
    with pytest.raises(dataclasses.FrozenInstanceError):
        cfg.min_arc = 8
    with pytest.raises(ConfigError):
        DetectorConfig(20, 4, ring_size=12)
    with pytest.raises(ConfigError):
        DetectorConfig(20, 4, min_arc=12)


def test_corner_record_round_trip():
    corners = [Corner(3, 4, 200, Polarity.BRIGHT), Corner(10, 3, 1, Polarity.DARK)]
    rec = corner_records(corners)
    assert rec.itemsize == 8
    assert as_corners(rec) == corners
    assert corner_records([]).size == 0
