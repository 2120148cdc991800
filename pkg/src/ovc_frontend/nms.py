"""3x3 non-maximal suppression over candidate score rows.

A candidate survives only if its score is nonzero and strictly greater than
all eight neighbours, so equal neighbours knock each other out. Neighbours
beyond the map edge count as zero.
"""

from __future__ import annotations

import numpy as np

from . import _kernels
from .core import FEATURE_DTYPE, Corner, Polarity, RowOrderViolation
from .detector import ScoreMap, ScoreRow


class NmsState:
    """Rolling three-row score buffer.

    Corners of row ``r`` come out of the :meth:`push_score_row` call that
    delivers row ``r + 1``. When ``height`` is given, pushing the final row
    also flushes it; otherwise call :meth:`finish`.
    """

    def __init__(self, width: int, height: int | None = None):
        self.width = width
        self.height = height
        self._zero = np.zeros(width, np.uint8)
        self._keep = np.zeros(width, np.uint8)
        self.reset()

    def reset(self) -> None:
        self._prev: ScoreRow | None = None
        self._cur: ScoreRow | None = None
        self.next_y = 0
        self.finished = False

    def _decide(self, below: np.ndarray | None) -> list[Corner]:
        cur = self._cur
        prev = self._zero if self._prev is None else self._prev.scores
        _kernels.suppress_row(prev, cur.scores, self._zero if below is None else below, self._keep)
        return [Corner(int(x), cur.y, int(cur.scores[x]), Polarity(int(cur.polarity[x])))
                for x in np.flatnonzero(self._keep)]

    def push_score_row(self, row: ScoreRow) -> list[Corner]:
        if self.finished or row.y != self.next_y:
            raise RowOrderViolation(f"expected score row {self.next_y}, got {row.y}")
        if row.scores.shape != (self.width,):
            raise ValueError(f"score row has shape {row.scores.shape}, expected ({self.width},)")
        row = ScoreRow(row.y, np.asarray(row.scores, np.uint8), np.asarray(row.polarity, np.uint8))
        out = self._decide(row.scores) if self._cur is not None else []
        self._prev, self._cur = self._cur, row
        self.next_y += 1
        if self.height is not None and self.next_y == self.height:
            out += self.finish()
        return out

    def finish(self) -> list[Corner]:
        """Flush the last buffered row as if a zero row followed it."""
        if self.finished:
            return []
        self.finished = True
        return self._decide(None) if self._cur is not None else []


def suppress_map(score_map: ScoreMap) -> np.ndarray:
    """Suppress a complete map in one pass.

    Returns the survivors as a :data:`~ovc_frontend.core.FEATURE_DTYPE`
    record array in raster order; the same corners, in the same order, as
    streaming every row through :class:`NmsState`.
    """
    xs, ys, ss, ps = _kernels.suppress_frame(np.ascontiguousarray(score_map.scores, np.uint8),
                                             np.ascontiguousarray(score_map.polarity, np.uint8))
    out = np.zeros(len(xs), dtype=FEATURE_DTYPE)
    out["x"], out["y"], out["score"], out["polarity"] = xs, ys, ss, ps
    return out
