"""Detector -> suppression -> bundle plumbing, plus the stream/bench/verify runs."""

from __future__ import annotations

import logging
import threading
import time
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable

import numpy as np

from . import sensor_sim
from .core import (LANE_WIDTHS, Corner, DetectorConfig, Frame, ImuSample, SensorId,
                   SensorRigConfig, corner_records, make_config, validate_frame)
from .detector import StreamingDetector, detect_frame
from .nms import NmsState, suppress_map
from .oracle import oracle_detect
from .transport import Disconnected, RingChannel, decode_bundle_records, encode_bundle

log = logging.getLogger(__name__)


# -- per-frame processing -----------------------------------------------------------


def detect_corners(frame: Frame, config: DetectorConfig) -> np.ndarray:
    """Batch detector + suppression; feature records in raster order."""
    return suppress_map(detect_frame(frame, config))


@dataclass
class StreamTrace:
    """Timing of every emission, in units of pixels consumed so far.

    ``candidates`` holds ``(row, pixels_consumed)`` per nonzero candidate;
    ``corners`` holds ``(row, score_rows_pushed)`` per surviving corner.
    """

    candidates: list[tuple[int, int]] = field(default_factory=list)
    corners: list[tuple[int, int]] = field(default_factory=list)
    score_rows: list[int] = field(default_factory=list)


class FrontEnd:
    """One sensor's streaming detector and suppressor chained together."""

    def __init__(self, width: int, height: int, config: DetectorConfig,
                 trace: StreamTrace | None = None):
        self.detector = StreamingDetector(width, height, config)
        self.nms = NmsState(width, height)
        self.trace = trace
        self.rows_pushed = 0

    def push_pixels(self, group) -> list[Corner]:
        candidates = self.detector.push_pixels(group)
        trace = self.trace
        if trace is not None:
            consumed = self.detector.pixels_consumed
            trace.candidates.extend((c.y, consumed) for c in candidates)
        out: list[Corner] = []
        for row in self.detector.take_rows():
            corners = self.nms.push_score_row(row)
            self.rows_pushed += 1
            if trace is not None:
                trace.score_rows.append(row.y)
                trace.corners.extend((c.y, self.rows_pushed) for c in corners)
            out.extend(corners)
        return out


def stream_frame(frame: Frame, config: DetectorConfig,
                 trace: StreamTrace | None = None) -> np.ndarray:
    """Push a frame through :class:`FrontEnd` one lane group at a time."""
    validate_frame(frame)
    fe = FrontEnd(frame.width, frame.height, config, trace)
    corners: list[Corner] = []
    for group in fe.detector.lane_groups(frame):
        corners.extend(fe.push_pixels(group))
    return corner_records(corners)


# -- verification ----------------------------------------------------------------------


def random_test_image(seed: int, trial: int, width: int, height: int) -> np.ndarray:
    """Seeded test image; the kind rotates so ties and low contrast get exercised."""
    rng = np.random.default_rng([seed, trial, width, height])
    kind = trial % 4
    if kind == 0:
        return rng.integers(0, 256, (height, width), dtype=np.uint8)
    if kind == 1:  # coarse alphabet: lots of equal scores for the tie rule
        return rng.choice(np.array([0, 128, 255], np.uint8), size=(height, width))
    if kind == 2:  # low contrast around mid-grey
        return rng.integers(100, 156, (height, width), dtype=np.uint8)
    base = rng.integers(0, 256, (height // 4 + 2, width // 4 + 2)).astype(np.float64)
    blocky = np.kron(base, np.ones((4, 4)))[:height, :width]
    return np.clip(blocky + rng.normal(0, 12, blocky.shape), 0, 255).astype(np.uint8)


@dataclass(frozen=True)
class Mismatch:
    seed: int
    trial: int
    width: int
    height: int
    threshold: int
    lanes: int
    expected: int
    got: int

    def reproducer(self) -> str:
        return (f"ovc-frontend verify --seed {self.seed} --only-trial {self.trial} "
                f"--sizes {self.width}x{self.height} --thresholds {self.threshold} "
                f"--lanes {self.lanes}")


@dataclass
class VerifyReport:
    frames: int = 0
    checks: int = 0
    mismatches: list[Mismatch] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.mismatches


def verify(seed: int, trials: int, sizes: Iterable[tuple[int, int]],
           thresholds: Iterable[int] = (20,), lanes: Iterable[int] = LANE_WIDTHS,
           only_trial: int | None = None,
           pipeline: Callable[[Frame, DetectorConfig], np.ndarray] | None = None) -> VerifyReport:
    """Compare ``pipeline`` against the oracle on seeded random frames.

    Each trial frame gets one threshold (cycling through ``thresholds``) and
    is checked at every lane width.
    """
    pipeline = pipeline or stream_frame
    thresholds = list(thresholds)
    lanes = list(lanes)
    report = VerifyReport()
    trial_ids = range(trials) if only_trial is None else [only_trial]
    for width, height in sizes:
        for trial in trial_ids:
            t = thresholds[trial % len(thresholds)]
            image = random_test_image(seed, trial, width, height)
            frame = Frame.from_image(image, frame_id=trial)
            expected = corner_records(oracle_detect(frame, make_config(t, 1))).tobytes()
            report.frames += 1
            for lane in lanes:
                got = pipeline(frame, make_config(t, lane)).tobytes()
                report.checks += 1
                if got != expected:
                    m = Mismatch(seed, trial, width, height, t, lane,
                                 len(expected) // 8, len(got) // 8)
                    log.warning("mismatch: %s", m)
                    report.mismatches.append(m)
    return report


# -- stream and bench runs ---------------------------------------------------------


@dataclass
class RunReport:
    """Outcome of a stream or bench run.

    ``frames_processed`` counts stereo frame pairs, so ``frames_per_second``
    is pairs per second of wall time.
    """

    frames_processed: int = 0
    corners_total: int = 0
    wall_time_s: float = 0.0
    frames_per_second: float = 0.0
    drops: int = 0
    imu_samples: int = 0
    bundles_consumed: int = 0
    stage_s: dict = field(default_factory=lambda: {"detector": 0.0, "nms": 0.0, "transport": 0.0})

    def finish(self, wall_time_s: float) -> "RunReport":
        self.wall_time_s = wall_time_s
        self.frames_per_second = self.frames_processed / wall_time_s if wall_time_s > 0 else 0.0
        return self

    def as_dict(self) -> dict:
        return asdict(self)

    def summary(self) -> str:
        stages = ", ".join(f"{k} {v * 1e3:.1f} ms" for k, v in self.stage_s.items())
        per = max(self.frames_processed, 1)
        per_pair = ", ".join(f"{k} {v / per * 1e3:.2f} ms" for k, v in self.stage_s.items())
        return (f"frame pairs: {self.frames_processed}\n"
                f"imu samples: {self.imu_samples}\n"
                f"corners total: {self.corners_total}\n"
                f"wall time: {self.wall_time_s:.3f} s\n"
                f"frame pairs/s: {self.frames_per_second:.2f}\n"
                f"drops: {self.drops}\n"
                f"stage totals: {stages}\n"
                f"stage per pair: {per_pair}")


def process_frame(frame: Frame, config: DetectorConfig, stage_s: dict) -> tuple[bytes, int]:
    t0 = time.perf_counter()
    score_map = detect_frame(frame, config)
    t1 = time.perf_counter()
    records = suppress_map(score_map)
    t2 = time.perf_counter()
    bundle = encode_bundle(frame, records)
    t3 = time.perf_counter()
    stage_s["detector"] += t1 - t0
    stage_s["nms"] += t2 - t1
    stage_s["transport"] += t3 - t2
    return bundle, len(records)


class SyncError(AssertionError):
    pass


class _Consumer(threading.Thread):
    """Drains the ring, decodes bundles and checks per-sensor time order."""

    def __init__(self, channel: RingChannel, keep: bool):
        super().__init__(name="bundle-consumer", daemon=True)
        self.channel = channel
        self.keep = keep
        self.bundles: list[bytes] = []
        self.count = 0
        self.error: BaseException | None = None
        self._last_ts = {SensorId.LEFT: -1, SensorId.RIGHT: -1}

    def run(self):
        try:
            while True:
                try:
                    bundle = self.channel.pop(block=True)
                except Disconnected:
                    return
                frame, _ = decode_bundle_records(bundle)
                if frame.timestamp_ns <= self._last_ts[frame.sensor_id]:
                    raise SyncError(f"{frame.sensor_id.name} timestamps went backwards")
                self._last_ts[frame.sensor_id] = frame.timestamp_ns
                self.count += 1
                if self.keep:
                    self.bundles.append(bundle)
        except BaseException as exc:  # surfaced by the producer after join
            self.error = exc


def run_stream(rig_config: SensorRigConfig, det_config: DetectorConfig, duration_s: float,
               ring_capacity: int = 4, realtime: bool = False, keep_bundles: bool = False,
               ) -> tuple[RunReport, list[bytes]]:
    """Simulate ``duration_s`` seconds of the rig through the whole front end.

    The producer thread runs the rig and both sensors' detector/suppression
    chains and pushes bundles into a :class:`RingChannel`; a consumer thread
    decodes them. Timestamps are virtual unless ``realtime`` is set.
    """
    rig = sensor_sim.open_rig(rig_config)
    end_ns = round(duration_s * 1e9)
    channel = RingChannel(ring_capacity)
    consumer = _Consumer(channel, keep_bundles)
    report = RunReport()
    last_ts = -1
    last_imu: ImuSample | None = None
    consumer.start()
    start = time.perf_counter()
    try:
        for event in rig.events_until(end_ns):
            ts = event.timestamp_ns
            if ts < last_ts:
                raise SyncError(f"event stream went backwards at {ts} ns")
            last_ts = ts
            if realtime:
                lag = ts / 1e9 - (time.perf_counter() - start)
                if lag > 0:
                    time.sleep(lag)
            if isinstance(event, sensor_sim.ImuEvent):
                if last_imu is not None and event.sample.timestamp_ns <= last_imu.timestamp_ns:
                    raise SyncError("IMU timestamps not strictly increasing")
                last_imu = event.sample
                report.imu_samples += 1
                continue
            left, right = event.left, event.right
            if (left.timestamp_ns, left.frame_id) != (right.timestamp_ns, right.frame_id):
                raise SyncError(f"frame pair {left.frame_id} is not synchronized")
            for frame in (left, right):
                bundle, n = process_frame(frame, det_config, report.stage_s)
                report.corners_total += n
                t0 = time.perf_counter()
                channel.push(bundle)
                report.stage_s["transport"] += time.perf_counter() - t0
            report.frames_processed += 1
    finally:
        channel.close()
        consumer.join()
    report.finish(time.perf_counter() - start)
    if consumer.error is not None:
        raise consumer.error
    stats = channel.stats()
    report.drops = stats["drops"]
    report.bundles_consumed = consumer.count
    if stats["pushes"] != stats["pops"] + stats["drops"] + stats["occupancy"]:
        raise SyncError(f"ring accounting broken: {stats}")
    return report, consumer.bundles


def run_bench(frames: int, det_config: DetectorConfig, image: np.ndarray | None = None,
              seed: int = 7, width: int = 1280, height: int = 1024) -> RunReport:
    """Sustained stereo throughput of detect + suppress + encode.

    Inputs are prepared up front so that image synthesis is not timed.
    """
    if image is not None:
        pairs = [(Frame.from_image(image, SensorId.LEFT), Frame.from_image(image, SensorId.RIGHT))]
    else:
        rig = sensor_sim.open_rig(SensorRigConfig(width=width, height=height, seed=seed))
        pairs = []
        while len(pairs) < min(frames, 4):
            ev = rig.next_event()
            if isinstance(ev, sensor_sim.FramePair):
                pairs.append((ev.left, ev.right))
    report = RunReport()
    if frames <= 0:
        return report.finish(0.0)
    detect_corners(pairs[0][0], det_config)  # JIT warm-up outside the timed loop
    start = time.perf_counter()
    for i in range(frames):
        for frame in pairs[i % len(pairs)]:
            _, n = process_frame(frame, det_config, report.stage_s)
            report.corners_total += n
        report.frames_processed += 1
    return report.finish(time.perf_counter() - start)
