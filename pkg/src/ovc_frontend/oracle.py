"""Brute-force reference for detection, scoring and suppression.

Written for readability, not speed, and kept apart from the streaming code:
it derives its own circle, enumerates every arc explicitly and suppresses
over the whole image at once. Everything is vectorized over pixels (or over
test cases) with numpy, but each pixel still goes through the naive
definition.
"""

from __future__ import annotations

import math

import numpy as np

from .core import Corner, DetectorConfig, Frame, Polarity, validate_frame

CIRCLE_RADIUS = 3
SHORTEST_ARC = 9


def circle_points() -> list[tuple[int, int]]:
    """Lattice points whose distance from the center rounds to 3, clockwise
    from straight up (image y axis points down)."""
    r = CIRCLE_RADIUS
    pts = [(dx, dy) for dy in range(-r, r + 1) for dx in range(-r, r + 1)
           if round(math.hypot(dx, dy)) == r]
    return sorted(pts, key=lambda p: math.atan2(p[0], -p[1]) % (2 * math.pi))


def _arcs():
    n = len(circle_points())
    for start in range(n):
        for length in range(SHORTEST_ARC, n + 1):
            yield [(start + k) % n for k in range(length)]


def oracle_segment_test(center, ring, t: int) -> np.ndarray:
    """Bright / dark flags (two bool arrays) by checking every arc in turn."""
    d = np.asarray(ring, dtype=np.int32) - np.asarray(center, dtype=np.int32)[..., None]
    bright = np.zeros(d.shape[:-1], dtype=bool)
    dark = np.zeros(d.shape[:-1], dtype=bool)
    for arc in _arcs():
        part = d[..., arc]
        bright |= np.all(part > t, axis=-1)
        dark |= np.all(-part > t, axis=-1)
    return bright, dark


def oracle_score_by_sweep(center, ring) -> np.ndarray | int:
    """Largest ``t`` with the pixel still passing at ``t - 1``, by sweeping.

    Works on a single ``(center, ring)`` or on arrays of them (ring on the
    last axis). Cases are dropped from the sweep once they fail, since a
    higher threshold can only remove arcs.
    """
    center = np.asarray(center)
    ring = np.asarray(ring)
    shape = np.broadcast_shapes(center.shape, ring.shape[:-1])
    centers = np.broadcast_to(center, shape).reshape(-1)
    rings = np.broadcast_to(ring, shape + ring.shape[-1:]).reshape(-1, ring.shape[-1])
    result = np.zeros(len(centers), dtype=np.int32)
    alive = np.arange(len(centers))
    for t in range(1, 256):
        if alive.size == 0:
            break
        bright, dark = oracle_segment_test(centers[alive], rings[alive], t - 1)
        passing = bright | dark
        result[alive[passing]] = t
        alive = alive[passing]
    if shape == ():
        return int(result[0])
    return result.reshape(shape)


def oracle_arc_score(d: np.ndarray) -> np.ndarray:
    """Weakest-link contrast of the best arc of length >= 9 with d > 0."""
    n = d.shape[-1]
    best = np.zeros(d.shape[:-1], dtype=np.int32)
    for start in range(n):
        running = d[..., start]
        for length in range(2, n + 1):
            running = np.minimum(running, d[..., (start + length - 1) % n])
            if length >= SHORTEST_ARC:
                best = np.maximum(best, running)
    return best


def _ring_stack(image: np.ndarray) -> np.ndarray:
    h, w = image.shape
    r = CIRCLE_RADIUS
    return np.stack([image[r + dy:h - r + dy, r + dx:w - r + dx] for dx, dy in circle_points()],
                    axis=-1)


def oracle_score_map(frame: Frame, config: DetectorConfig) -> tuple[np.ndarray, np.ndarray]:
    """Dense (scores, polarity) arrays; scores not above the threshold are zeroed."""
    validate_frame(frame)
    image = frame.image.astype(np.int32)
    r = CIRCLE_RADIUS
    d = _ring_stack(image) - image[r:-r, r:-r, None]
    bright = oracle_arc_score(d)
    dark = oracle_arc_score(-d)
    score = np.maximum(bright, dark)
    score[score <= config.threshold] = 0
    scores = np.zeros(image.shape, dtype=np.int32)
    polarity = np.zeros(image.shape, dtype=np.int32)
    scores[r:-r, r:-r] = score
    polarity[r:-r, r:-r] = np.where(dark > bright, int(Polarity.DARK), int(Polarity.BRIGHT))
    return scores, polarity


def oracle_suppress(scores: np.ndarray) -> np.ndarray:
    """Boolean mask of nonzero scores strictly above all 8 neighbours."""
    h, w = scores.shape
    padded = np.zeros((h + 2, w + 2), dtype=scores.dtype)
    padded[1:-1, 1:-1] = scores
    keep = scores > 0
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            if dx or dy:
                keep &= scores > padded[1 + dy:h + 1 + dy, 1 + dx:w + 1 + dx]
    return keep


def oracle_detect(frame: Frame, config: DetectorConfig) -> list[Corner]:
    """Reference corner list in raster order. Ignores lanes and streaming."""
    scores, polarity = oracle_score_map(frame, config)
    ys, xs = np.nonzero(oracle_suppress(scores))
    return [Corner(int(x), int(y), int(scores[y, x]), Polarity(int(polarity[y, x])))
            for y, x in zip(ys, xs)]
