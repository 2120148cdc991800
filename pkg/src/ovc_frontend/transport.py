"""Simulated DMA path: frame bundles and a drop-oldest ring channel.

Bundle layout, little-endian::

    offset  size  field
    0       4     magic 0x4F564331 ("OVC1" read as a big-endian word)
    4       2     version (1)
    6       1     sensor_id
    7       1     flags (0)
    8       8     frame_id
    16      8     timestamp_ns
    24      2     width
    26      2     height
    28      4     feature_count
    32      w*h   pixels, row-major
    ...     8*n   features {x u16, y u16, score u16, polarity u8, pad u8}

The feature list sits immediately after the raw image so a reader can take
both from one contiguous buffer.
"""

from __future__ import annotations

import collections
import struct
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from .core import (FEATURE_DTYPE, Corner, Frame, OvcError, SensorId, as_corners, corner_records,
                   validate_frame)

MAGIC = 0x4F564331
VERSION = 1
HEADER = struct.Struct("<IHBBQQHHI")
HEADER_SIZE = HEADER.size
FEATURE_SIZE = FEATURE_DTYPE.itemsize
MAX_FEATURES = 2**32 - 1

assert HEADER_SIZE == 32 and FEATURE_SIZE == 8


class BundleError(OvcError, ValueError):
    pass


class BadMagic(BundleError):
    pass


class BadVersion(BundleError):
    pass


class TruncatedBundle(BundleError):
    pass


class BundleLengthMismatch(BundleError):
    pass


class TooManyFeatures(BundleError):
    pass


class Disconnected(OvcError):
    pass


@dataclass(frozen=True)
class BundleHeader:
    sensor_id: SensorId
    frame_id: int
    timestamp_ns: int
    width: int
    height: int
    feature_count: int
    flags: int = 0

    @property
    def total_size(self) -> int:
        return bundle_size(self.width, self.height, self.feature_count)


def bundle_size(width: int, height: int, feature_count: int) -> int:
    return HEADER_SIZE + width * height + FEATURE_SIZE * feature_count


def encode_bundle(frame: Frame, corners: np.ndarray | Sequence[Corner]) -> bytes:
    validate_frame(frame)
    records = corner_records(corners)
    if len(records) > MAX_FEATURES:
        raise TooManyFeatures(f"{len(records)} features do not fit a u32 count")
    if len(records) and (records["x"].max() >= frame.width or records["y"].max() >= frame.height):
        raise ValueError("corner outside the frame")
    header = HEADER.pack(MAGIC, VERSION, int(frame.sensor_id), 0, frame.frame_id,
                         frame.timestamp_ns, frame.width, frame.height, len(records))
    return b"".join((header, frame.pixels.tobytes(), records.tobytes()))


def decode_header(data: bytes | memoryview) -> BundleHeader:
    if len(data) < HEADER_SIZE:
        raise TruncatedBundle(f"{len(data)} bytes is shorter than the {HEADER_SIZE}-byte header")
    magic, version, sensor, flags, frame_id, ts, w, h, n = HEADER.unpack_from(data)
    if magic != MAGIC:
        raise BadMagic(f"bad magic 0x{magic:08X}")
    if version != VERSION:
        raise BadVersion(f"unsupported bundle version {version}")
    try:
        sensor = SensorId(sensor)
    except ValueError:
        raise BundleError(f"unknown sensor id {sensor}") from None
    return BundleHeader(sensor, frame_id, ts, w, h, n, flags)


def decode_bundle_records(data: bytes | memoryview) -> tuple[Frame, np.ndarray]:
    """Like :func:`decode_bundle` but returns the features as a record array."""
    header = decode_header(data)
    expected = header.total_size
    if len(data) < expected:
        raise TruncatedBundle(f"bundle needs {expected} bytes, got {len(data)}")
    if len(data) > expected:
        raise BundleLengthMismatch(f"bundle is {len(data)} bytes, header says {expected}")
    npix = header.width * header.height
    pixels = np.frombuffer(data, dtype=np.uint8, count=npix, offset=HEADER_SIZE)
    records = np.frombuffer(data, dtype=FEATURE_DTYPE, count=header.feature_count,
                            offset=HEADER_SIZE + npix).copy()
    frame = Frame(header.sensor_id, header.frame_id, header.timestamp_ns,
                  header.width, header.height, pixels.copy())
    return frame, records


def decode_bundle(data: bytes | memoryview) -> tuple[Frame, list[Corner]]:
    frame, records = decode_bundle_records(data)
    return frame, as_corners(records)


def split_bundles(data: bytes) -> Iterator[memoryview]:
    """Yield each bundle of a back-to-back concatenation (an ``.ovcb`` file)."""
    view = memoryview(data)
    pos = 0
    while pos < len(view):
        header = decode_header(view[pos:])
        end = pos + header.total_size
        if end > len(view):
            raise TruncatedBundle(f"bundle at offset {pos} runs past end of data")
        yield view[pos:end]
        pos = end


def write_bundles(path: str | Path, bundles: Sequence[bytes]) -> None:
    with open(path, "wb") as fh:
        for b in bundles:
            fh.write(b)


def read_bundles(path: str | Path) -> list[tuple[Frame, np.ndarray]]:
    data = Path(path).read_bytes()
    return [decode_bundle_records(b) for b in split_bundles(data)]


class RingChannel:
    """Bounded single-producer / single-consumer queue that drops the oldest.

    A push into a full ring discards the stalest entry, bumps
    ``drop_count`` and still accepts the new one. :meth:`stats` returns
    a consistent snapshot in which ``pushes == pops + drops + occupancy``.
    """

    def __init__(self, capacity: int = 4):
        if capacity < 1:
            raise ValueError("capacity must be at least 1")
        self.capacity = capacity
        self._items: collections.deque = collections.deque()
        self._cond = threading.Condition(threading.Lock())
        self._closed = False
        self.pushes = 0
        self.pops = 0
        self.drop_count = 0

    def push(self, bundle) -> bool:
        """Enqueue ``bundle``. Returns False if an older bundle was dropped."""
        with self._cond:
            if self._closed:
                raise Disconnected("push on a closed channel")
            accepted_clean = True
            if len(self._items) >= self.capacity:
                self._items.popleft()
                self.drop_count += 1
                accepted_clean = False
            self._items.append(bundle)
            self.pushes += 1
            self._cond.notify()
            return accepted_clean

    def pop(self, block: bool = False, timeout: float | None = None):
        """Dequeue the oldest surviving bundle.

        Non-blocking pops return ``None`` on an empty ring. Once the producer
        has closed the channel and the ring is drained, raises
        :class:`Disconnected`.
        """
        deadline = None if timeout is None else time.monotonic() + timeout
        with self._cond:
            while not self._items:
                if self._closed:
                    raise Disconnected("producer closed and ring drained")
                if not block:
                    return None
                remaining = None if deadline is None else deadline - time.monotonic()
                if remaining is not None and remaining <= 0:
                    return None
                self._cond.wait(remaining)
            self.pops += 1
            return self._items.popleft()

    def close(self) -> None:
        with self._cond:
            self._closed = True
            self._cond.notify_all()

    @property
    def closed(self) -> bool:
        return self._closed

    def __len__(self) -> int:
        with self._cond:
            return len(self._items)

    def stats(self) -> dict:
        with self._cond:
            return {"pushes": self.pushes, "pops": self.pops, "drops": self.drop_count,
                    "occupancy": len(self._items)}
