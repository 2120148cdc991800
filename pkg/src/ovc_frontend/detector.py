"""Streaming segment-test corner detector.

Pixels arrive in raster order, ``lane_width`` adjacent pixels per tick, and
pass through a rolling buffer of seven image lines. As soon as the pixel at
``(x + 3, y + 3)`` lands, candidate ``(x, y)`` has its full 7x7 window and is
scored in the same tick. A score row is complete when the last pixel of line
``y + 3`` arrives.

The score of a pixel is the largest ``t`` at which it still passes the test:
over every wrap-around arc of 9 or more same-sign differences, take the
smallest absolute difference, then the largest of those.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from . import _kernels
from .core import (HALF_WINDOW, MIN_ARC, RING_SIZE, WINDOW, Corner, DetectorConfig, Frame,
                   GeometryOverflow, Polarity, validate_frame)

__all__ = [
    "ScoreRow", "ScoreMap", "StreamingDetector", "ring_offsets", "segment_test",
    "corner_score", "segment_test_many", "corner_score_many", "detect_frame",
]

_RING = tuple(zip(_kernels.RING_DX.tolist(), _kernels.RING_DY.tolist()))
_BITS = (1 << np.arange(RING_SIZE)).astype(np.uint32)


def ring_offsets() -> tuple[tuple[int, int], ...]:
    """The 16 ``(dx, dy)`` circle offsets, clockwise from ``(0, -3)``."""
    return _RING


# -- scalar/vectorized reference forms ------------------------------------------


def _differences(center, ring) -> np.ndarray:
    ring = np.asarray(ring, dtype=np.int16)
    if ring.shape[-1] != RING_SIZE:
        raise ValueError(f"ring must have {RING_SIZE} entries, got shape {ring.shape}")
    return ring - np.asarray(center, dtype=np.int16)[..., None]


def _has_long_run(mask: np.ndarray) -> np.ndarray:
    # A 9-bit run anywhere on the circle shows up in the doubled word.
    m = mask | (mask << RING_SIZE)
    run = m & (m >> 1)
    run &= run >> 2
    run &= run >> 4
    run &= m >> 8
    return run != 0


def segment_test_many(center, ring, t: int) -> np.ndarray:
    """Vectorized segment test. Returns int8 codes: -1 none, 0 bright, 1 dark."""
    d = _differences(center, ring)
    bright = _has_long_run(((d > t) * _BITS).sum(axis=-1, dtype=np.uint32))
    dark = _has_long_run(((-d > t) * _BITS).sum(axis=-1, dtype=np.uint32))
    out = np.full(d.shape[:-1], -1, dtype=np.int8)
    out[dark] = Polarity.DARK
    out[bright] = Polarity.BRIGHT  # both at once needs 18 entries; cannot happen
    return out


def segment_test(center: int, ring, t: int) -> Polarity | None:
    """Classify one pixel: bright if 9+ contiguous ring entries exceed center+t,
    dark if 9+ contiguous entries fall below center-t, else None."""
    code = int(segment_test_many(center, ring, t))
    return None if code < 0 else Polarity(code)


def _best_min_arc(d: np.ndarray) -> np.ndarray:
    # max over rotations of the min over MIN_ARC consecutive entries; longer
    # arcs never beat their own 9-entry sub-arcs
    run = d
    for k in range(1, MIN_ARC):
        run = np.minimum(run, np.roll(d, -k, axis=-1))
    return run.max(axis=-1)


def corner_score_many(center, ring) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized score. Returns (score, code) with code -1 where score is 0."""
    d = _differences(center, ring)
    bright = np.maximum(_best_min_arc(d), 0)
    dark = np.maximum(_best_min_arc(-d), 0)
    score = np.maximum(bright, dark)
    code = np.where(score == 0, -1, np.where(bright >= dark, Polarity.BRIGHT, Polarity.DARK))
    return score.astype(np.int16), code.astype(np.int8)


def corner_score(center: int, ring) -> tuple[int, Polarity | None]:
    score, code = corner_score_many(center, ring)
    return int(score), (None if code < 0 else Polarity(int(code)))


# -- score maps ------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ScoreRow:
    """Per-column candidate scores for one image row (0 = not a candidate)."""

    y: int
    scores: np.ndarray
    polarity: np.ndarray


@dataclass(frozen=True, eq=False)
class ScoreMap:
    scores: np.ndarray    # (height, width) uint8
    polarity: np.ndarray  # (height, width) uint8, meaningful where scores > 0

    @classmethod
    def zeros(cls, width: int, height: int) -> "ScoreMap":
        return cls(np.zeros((height, width), np.uint8), np.zeros((height, width), np.uint8))

    @property
    def height(self) -> int:
        return self.scores.shape[0]

    @property
    def width(self) -> int:
        return self.scores.shape[1]

    def row(self, y: int) -> ScoreRow:
        return ScoreRow(y, self.scores[y], self.polarity[y])

    def rows(self) -> Iterator[ScoreRow]:
        for y in range(self.height):
            yield self.row(y)

    def candidates(self) -> list[Corner]:
        ys, xs = np.nonzero(self.scores)
        return [Corner(int(x), int(y), int(self.scores[y, x]), Polarity(int(self.polarity[y, x])))
                for y, x in zip(ys, xs)]

    def __eq__(self, other):
        if not isinstance(other, ScoreMap):
            return NotImplemented
        live = self.scores > 0
        return (np.array_equal(self.scores, other.scores)
                and np.array_equal(self.polarity[live], other.polarity[live]))


def detect_frame(frame: Frame, config: DetectorConfig) -> ScoreMap:
    """Dense candidate scores for a whole frame, before suppression.

    Produces the same map as pushing the frame through
    :class:`StreamingDetector`, one whole row per kernel call.
    """
    validate_frame(frame)
    out = ScoreMap.zeros(frame.width, frame.height)
    _kernels.score_frame(frame.image, config.threshold, out.scores, out.polarity)
    return out


# -- streaming --------------------------------------------------------------------


class StreamingDetector:
    """Line-buffer detector fed one lane group at a time.

    ``push_pixels`` returns the nonzero candidates that became evaluable in
    that tick. Completed :class:`ScoreRow` objects, zero rows included, queue
    up until :meth:`take_rows` collects them, always in ascending ``y``.

    When ``width`` is not a multiple of the lane width, the final group of
    each row carries pad pixels that are ignored.
    """

    def __init__(self, width: int, height: int, config: DetectorConfig):
        if width < WINDOW or height < WINDOW:
            raise ValueError(f"{width}x{height} frame cannot hold a {WINDOW}x{WINDOW} window")
        self.width = width
        self.height = height
        self.config = config
        self.lanes = config.lane_width
        self.groups_per_row = -(-width // self.lanes)
        self._lines = np.zeros((WINDOW, width), dtype=np.uint8)
        self._scratch = _kernels.make_scratch(width)
        self.reset()

    def reset(self) -> None:
        self.row = 0
        self.column = 0
        self.pixels_consumed = 0
        self._pending = np.zeros(self.width, np.uint8), np.zeros(self.width, np.uint8)
        self._ready: list[ScoreRow] = []
        self._next_row_out = 0

    @property
    def done(self) -> bool:
        return self.row >= self.height

    def take_rows(self) -> list[ScoreRow]:
        rows, self._ready = self._ready, []
        return rows

    def _emit_zero_rows(self, upto: int) -> None:
        while self._next_row_out < upto:
            z = np.zeros(self.width, np.uint8)
            self._ready.append(ScoreRow(self._next_row_out, z, z.copy()))
            self._next_row_out += 1

    def push_pixels(self, group) -> list[Corner]:
        lanes = self.lanes
        if len(group) != lanes:
            raise ValueError(f"lane group must hold {lanes} pixels, got {len(group)}")
        y = self.row
        if y >= self.height:
            raise GeometryOverflow(
                f"pushed past the end of a {self.width}x{self.height} frame")
        w = self.width
        c0 = self.column
        c1 = c0 + lanes
        lines = self._lines
        if c0 == 0:
            # shift the line buffer up by one line; the newest line sits at the bottom
            lines[:-1] = lines[1:]
            if y == 0:
                self._emit_zero_rows(HALF_WINDOW)
        if c1 > w:
            c1 = w
            lines[-1, c0:c1] = group[:c1 - c0]
        else:
            lines[-1, c0:c1] = group
        self.pixels_consumed += c1 - c0

        emitted: list[Corner] = []
        if y >= WINDOW - 1:
            x0 = max(c0 - HALF_WINDOW, HALF_WINDOW)
            x1 = min(c1 - HALF_WINDOW, w - HALF_WINDOW)
            if x1 > x0:
                scores, pols = self._pending
                hits = _kernels.score_span(lines, HALF_WINDOW, x0, x1 - x0,
                                           self.config.threshold, self._scratch, scores, pols)
                if hits:
                    cy = y - HALF_WINDOW
                    for x in range(x0, x1):
                        if scores[x]:
                            emitted.append(Corner(x, cy, int(scores[x]), Polarity(int(pols[x]))))

        if c1 == w:
            if y >= WINDOW - 1:
                cy = y - HALF_WINDOW
                self._ready.append(ScoreRow(cy, *self._pending))
                self._next_row_out = cy + 1
                self._pending = np.zeros(w, np.uint8), np.zeros(w, np.uint8)
            self.row = y + 1
            self.column = 0
            if self.row >= self.height:
                self._emit_zero_rows(self.height)
        else:
            self.column = c1
        return emitted

    def lane_groups(self, frame: Frame) -> Iterator[np.ndarray]:
        """Split a frame into the zero-padded lane groups this detector expects."""
        lanes = self.lanes
        padded = np.zeros((frame.height, self.groups_per_row * lanes), dtype=np.uint8)
        padded[:, :frame.width] = frame.image
        for row in padded:
            yield from row.reshape(-1, lanes)
