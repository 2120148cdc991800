"""Domain types, configuration and validation shared by the whole front end.

Intensities are 8-bit unsigned. Timestamps are unsigned 64-bit nanoseconds
counted from simulator start on one clock shared by cameras and IMU.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

RING_SIZE = 16
MIN_ARC = 9
WINDOW = 7
HALF_WINDOW = WINDOW // 2
LANE_WIDTHS = (1, 2, 4, 8)
MAX_THRESHOLD = 254
NS_PER_S = 1_000_000_000
U64_MAX = 2**64 - 1


# -- errors -------------------------------------------------------------------


class OvcError(Exception):
    """Base class for every error raised by this package."""


class FrameError(OvcError, ValueError):
    pass


class DimensionTooSmall(FrameError):
    pass


class LengthMismatch(FrameError):
    pass


class ConfigError(OvcError, ValueError):
    pass


class BadThreshold(ConfigError):
    pass


class BadLaneWidth(ConfigError):
    pass


class BadRateRatio(ConfigError):
    pass


class BadImageFormat(OvcError, ValueError):
    pass


class EndOfSequence(OvcError):
    pass


class GeometryOverflow(OvcError):
    pass


class RowOrderViolation(OvcError):
    pass


# -- enums and small records ----------------------------------------------------


class SensorId(enum.IntEnum):
    LEFT = 0
    RIGHT = 1


class Polarity(enum.IntEnum):
    """Which side of the center intensity the qualifying arc lies on."""

    BRIGHT = 0
    DARK = 1


class Corner(NamedTuple):
    x: int
    y: int
    score: int
    polarity: Polarity


@dataclass(frozen=True, eq=False)
class Frame:
    """One monochrome image as it leaves a sensor.

    ``pixels`` is stored flat in row-major order and is made read-only. The
    constructor deliberately does not check the geometry; use
    :func:`validate_frame` for that.
    """

    sensor_id: SensorId
    frame_id: int
    timestamp_ns: int
    width: int
    height: int
    pixels: np.ndarray = field(repr=False)

    def __post_init__(self):
        flat = np.ascontiguousarray(self.pixels, dtype=np.uint8).reshape(-1).view()
        flat.flags.writeable = False
        object.__setattr__(self, "pixels", flat)
        object.__setattr__(self, "sensor_id", SensorId(self.sensor_id))

    @classmethod
    def from_image(cls, image: np.ndarray, sensor_id: SensorId = SensorId.LEFT,
                   frame_id: int = 0, timestamp_ns: int = 0) -> "Frame":
        image = np.asarray(image)
        if image.ndim != 2:
            raise BadImageFormat(f"expected a 2-D image, got shape {image.shape}")
        h, w = image.shape
        return cls(sensor_id, frame_id, timestamp_ns, w, h, image)

    @property
    def image(self) -> np.ndarray:
        """Read-only (height, width) view of the pixels."""
        return self.pixels.reshape(self.height, self.width)

    def __eq__(self, other):
        if not isinstance(other, Frame):
            return NotImplemented
        return (self.sensor_id == other.sensor_id
                and self.frame_id == other.frame_id
                and self.timestamp_ns == other.timestamp_ns
                and self.width == other.width
                and self.height == other.height
                and np.array_equal(self.pixels, other.pixels))

    __hash__ = None


@dataclass(frozen=True)
class ImuSample:
    timestamp_ns: int
    accel: tuple[float, float, float]
    gyro: tuple[float, float, float]
    seq: int


@dataclass(frozen=True)
class DetectorConfig:
    """Segment-test parameters.

    Only ``threshold`` and ``lane_width`` are tunable; the circle size, the
    minimum arc and the window are fixed and any other value is rejected.
    """

    threshold: int = 20
    lane_width: int = 4
    ring_size: int = RING_SIZE
    min_arc: int = MIN_ARC
    window: int = WINDOW

    def __post_init__(self):
        if isinstance(self.threshold, bool) or not isinstance(self.threshold, (int, np.integer)):
            raise BadThreshold(f"threshold must be an integer, got {self.threshold!r}")
        if not 0 <= self.threshold <= MAX_THRESHOLD:
            raise BadThreshold(f"threshold {self.threshold} outside [0, {MAX_THRESHOLD}]")
        if self.lane_width not in LANE_WIDTHS:
            raise BadLaneWidth(f"lane width {self.lane_width} not in {LANE_WIDTHS}")
        fixed = (self.ring_size, self.min_arc, self.window)
        if fixed != (RING_SIZE, MIN_ARC, WINDOW):
            raise ConfigError(f"ring/arc/window are fixed at {RING_SIZE}/{MIN_ARC}/{WINDOW}, got {fixed}")
        object.__setattr__(self, "threshold", int(self.threshold))
        object.__setattr__(self, "lane_width", int(self.lane_width))


@dataclass(frozen=True)
class ImageSequence:
    """Image source backed by binary PGM files, cycled in order.

    Each file feeds both sensors of a pair.
    """

    paths: tuple[Path, ...]
    loop: bool = True

    def __post_init__(self):
        object.__setattr__(self, "paths", tuple(Path(p) for p in self.paths))


@dataclass(frozen=True)
class SensorRigConfig:
    width: int = 1280
    height: int = 1024
    frame_rate_hz: int = 20
    imu_rate_hz: int = 200
    seed: int = 7
    source: ImageSequence | None = None  # None selects the seeded synthetic scene
    motifs: int = 32


# -- operations -----------------------------------------------------------------


def validate_frame(frame: Frame) -> None:
    """Raise if ``frame`` cannot be fed to the detector."""
    if frame.width < WINDOW or frame.height < WINDOW:
        raise DimensionTooSmall(
            f"{frame.width}x{frame.height} frame is smaller than the {WINDOW}x{WINDOW} window")
    if frame.pixels.size != frame.width * frame.height:
        raise LengthMismatch(
            f"{frame.pixels.size} pixels for a {frame.width}x{frame.height} frame")


def make_config(threshold: int = 20, lane_width: int = 4) -> DetectorConfig:
    return DetectorConfig(threshold=threshold, lane_width=lane_width)


def check_rig_config(config: SensorRigConfig) -> None:
    """Raise :class:`ConfigError` unless the rig can produce an exact schedule."""
    if config.width < WINDOW or config.height < WINDOW:
        raise DimensionTooSmall(f"{config.width}x{config.height} is smaller than the detector window")
    if config.width > 0xFFFF or config.height > 0xFFFF:
        raise ConfigError("frame dimensions must fit in 16 bits")
    for name in ("frame_rate_hz", "imu_rate_hz"):
        rate = getattr(config, name)
        if not isinstance(rate, (int, np.integer)) or rate <= 0:
            raise ConfigError(f"{name} must be a positive integer, got {rate!r}")
    if config.imu_rate_hz % config.frame_rate_hz:
        raise BadRateRatio(
            f"imu rate {config.imu_rate_hz} Hz is not a multiple of frame rate {config.frame_rate_hz} Hz")
    # the frame period is a multiple of the IMU period, so one check covers both
    if NS_PER_S % config.imu_rate_hz:
        raise ConfigError(f"imu_rate_hz={config.imu_rate_hz} does not give a whole-nanosecond period")
    if not 0 <= config.seed <= U64_MAX:
        raise ConfigError(f"seed {config.seed} is not an unsigned 64-bit value")
    if config.motifs < 0:
        raise ConfigError("motif count must be non-negative")


def as_corners(records: np.ndarray | Sequence[Corner]) -> list[Corner]:
    """Convert feature records (see :data:`FEATURE_DTYPE`) to :class:`Corner` tuples."""
    if isinstance(records, np.ndarray):
        return [Corner(int(x), int(y), int(s), Polarity(int(p)))
                for x, y, s, p in zip(records["x"], records["y"], records["score"], records["polarity"])]
    return [Corner(int(c.x), int(c.y), int(c.score), Polarity(int(c.polarity))) for c in records]


# One feature record, exactly as it trails the pixels in a bundle.
FEATURE_DTYPE = np.dtype([("x", "<u2"), ("y", "<u2"), ("score", "<u2"),
                          ("polarity", "u1"), ("pad", "u1")])


def corner_records(corners: np.ndarray | Sequence[Corner]) -> np.ndarray:
    """Pack corners into a :data:`FEATURE_DTYPE` array (pass-through for arrays)."""
    if isinstance(corners, np.ndarray):
        if corners.dtype != FEATURE_DTYPE:
            raise TypeError(f"expected FEATURE_DTYPE records, got {corners.dtype}")
        return corners
    out = np.zeros(len(corners), dtype=FEATURE_DTYPE)
    if len(corners):
        arr = np.asarray([(c.x, c.y, c.score, int(c.polarity)) for c in corners], dtype=np.int64)
        if arr.min() < 0 or arr[:, :3].max() > 0xFFFF or arr[:, 3].max() > 1:
            raise ValueError("corner fields out of range for the feature record")
        out["x"], out["y"], out["score"], out["polarity"] = arr.T
    return out
