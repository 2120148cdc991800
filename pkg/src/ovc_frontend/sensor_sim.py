"""Deterministic stereo camera + IMU rig on a single nanosecond clock.

Frame ``k`` triggers at ``k * 1e9 / frame_rate`` ns and IMU sample ``k`` at
``k * 1e9 / imu_rate`` ns. Both cameras share the trigger, so a pair carries
one timestamp and one frame id. The frame timestamp is the trigger instant
(exposure start); shift by half an exposure if a midpoint is wanted. When an
IMU sample and a frame trigger coincide, the IMU sample comes first.

Synthetic frames are white noise with a few 7x7 corner motifs stamped in.
Each frame is a pure function of ``(seed, frame_id, sensor)``, so streams
are bit-reproducible.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterator, Union

import numpy as np

from .core import (NS_PER_S, BadImageFormat, EndOfSequence, Frame, ImuSample, SensorId,
                   SensorRigConfig, check_rig_config)
from .pgm import read_pgm

log = logging.getLogger(__name__)

GRAVITY = 9.80665
ACCEL_NOISE = 0.02
GYRO_NOISE = 0.001
_IMU_STREAM = 0x494D55  # separates the IMU noise stream from image streams


@dataclass(frozen=True)
class FramePair:
    left: Frame
    right: Frame

    @property
    def timestamp_ns(self) -> int:
        return self.left.timestamp_ns

    @property
    def frame_id(self) -> int:
        return self.left.frame_id


@dataclass(frozen=True)
class ImuEvent:
    sample: ImuSample

    @property
    def timestamp_ns(self) -> int:
        return self.sample.timestamp_ns


SensorEvent = Union[FramePair, ImuEvent]


@dataclass(frozen=True)
class RateReport:
    ratio: int
    frame_period_ns: int
    imu_period_ns: int


def frames_per_imu_window(config: SensorRigConfig) -> RateReport:
    """IMU samples per frame interval, plus both periods in nanoseconds."""
    check_rig_config(config)
    return RateReport(config.imu_rate_hz // config.frame_rate_hz,
                      NS_PER_S // config.frame_rate_hz,
                      NS_PER_S // config.imu_rate_hz)


def corner_motif(background: int = 220, center: int = 40) -> np.ndarray:
    """7x7 patch of ``background`` with a single contrasting center pixel.

    Every one of the 16 circle points differs from the center by
    ``background - center``, so the center scores exactly that much.
    """
    patch = np.full((7, 7), background, dtype=np.uint8)
    patch[3, 3] = center
    return patch


def synthetic_image(seed: int, frame_id: int, sensor: int, width: int, height: int,
                    motifs: int) -> np.ndarray:
    rng = np.random.default_rng([seed, frame_id, sensor])
    image = rng.integers(0, 256, size=(height, width), dtype=np.uint8)
    for _ in range(motifs):
        x = int(rng.integers(3, width - 3))
        y = int(rng.integers(3, height - 3))
        if rng.random() < 0.5:
            patch = corner_motif(220, 40)
        else:
            patch = corner_motif(40, 220)
        image[y - 3:y + 4, x - 3:x + 4] = patch
    return image


class Rig:
    """Stateful event source; iterate it or call :meth:`next_event`."""

    def __init__(self, config: SensorRigConfig):
        check_rig_config(config)
        self.config = config
        rates = frames_per_imu_window(config)
        self.frame_period_ns = rates.frame_period_ns
        self.imu_period_ns = rates.imu_period_ns
        self._frame_rate = config.frame_rate_hz
        self._imu_rate = config.imu_rate_hz
        self._images: list[np.ndarray] | None = None
        if config.source is not None:
            self._images = [read_pgm(p) for p in config.source.paths]
            if not self._images:
                raise BadImageFormat("image sequence is empty")
            shapes = {im.shape for im in self._images}
            if len(shapes) != 1:
                raise BadImageFormat(f"image sequence mixes sizes {sorted(shapes)}")
            self.height, self.width = self._images[0].shape
            if self.width < 7 or self.height < 7:
                raise BadImageFormat(f"{self.width}x{self.height} images are too small")
        else:
            self.width, self.height = config.width, config.height
        self._imu_rng = np.random.default_rng([config.seed, _IMU_STREAM])
        self.frame_index = 0
        self.imu_index = 0

    def frame_time(self, k: int) -> int:
        return k * NS_PER_S // self._frame_rate

    def imu_time(self, k: int) -> int:
        return k * NS_PER_S // self._imu_rate

    def _image(self, frame_id: int, sensor: SensorId) -> np.ndarray:
        if self._images is None:
            c = self.config
            return synthetic_image(c.seed, frame_id, int(sensor), c.width, c.height, c.motifs)
        return self._images[frame_id % len(self._images)]

    def _next_imu(self) -> ImuEvent:
        k = self.imu_index
        noise = self._imu_rng.normal(size=6)
        accel = (ACCEL_NOISE * noise[0], ACCEL_NOISE * noise[1], GRAVITY + ACCEL_NOISE * noise[2])
        gyro = tuple(GYRO_NOISE * noise[3:6])
        self.imu_index += 1
        return ImuEvent(ImuSample(self.imu_time(k), accel, gyro, k))

    def _next_pair(self) -> FramePair:
        k = self.frame_index
        if self._images is not None and not self.config.source.loop and k >= len(self._images):
            raise EndOfSequence(f"image sequence exhausted after {len(self._images)} frames")
        ts = self.frame_time(k)
        left = Frame(SensorId.LEFT, k, ts, self.width, self.height, self._image(k, SensorId.LEFT))
        right = Frame(SensorId.RIGHT, k, ts, self.width, self.height, self._image(k, SensorId.RIGHT))
        self.frame_index += 1
        return FramePair(left, right)

    def peek_time(self) -> int:
        return min(self.imu_time(self.imu_index), self.frame_time(self.frame_index))

    def next_event(self) -> SensorEvent:
        if self.imu_time(self.imu_index) <= self.frame_time(self.frame_index):
            return self._next_imu()
        return self._next_pair()

    def events_until(self, end_ns: int) -> Iterator[SensorEvent]:
        """Events with timestamp strictly before ``end_ns``."""
        while self.peek_time() < end_ns:
            yield self.next_event()

    def __iter__(self):
        return self

    def __next__(self) -> SensorEvent:
        try:
            return self.next_event()
        except EndOfSequence:
            raise StopIteration from None


def open_rig(config: SensorRigConfig) -> Rig:
    return Rig(config)
