"""Compiled inner loops for the segment test and 3x3 suppression.

The span kernel is the single evaluation unit shared by the batch and the
streaming detectors: the batch path hands it whole image rows, the streaming
path hands it the handful of columns that a lane group made evaluable. All
loops run over contiguous row slices so LLVM can vectorize them.

Per polarity the differences are saturated into uint8 (``max(r, c) - c`` for
bright, ``c - min(r, c)`` for dark). Clipping at zero leaves the score
unchanged because the score is a max of mins and any arc touching a
non-positive entry scores zero anyway.
"""

import numba as nb
import numpy as np

# Clockwise from twelve o'clock, image coordinates (y grows downward).
RING_DX = np.array([0, 1, 2, 3, 3, 3, 2, 1, 0, -1, -2, -3, -3, -3, -2, -1], dtype=np.int64)
RING_DY = np.array([-3, -3, -2, -1, 0, 1, 2, 3, 3, 3, 2, 1, 0, -1, -2, -3], dtype=np.int64)

# Rows of the scratch block handed to score_span.
_BRIGHT, _DARK, _A, _B, _BEST_BRIGHT, _BEST_DARK = 0, 16, 32, 48, 64, 65
SCRATCH_ROWS = 66


def make_scratch(width):
    return np.empty((SCRATCH_ROWS, max(width, 1)), dtype=np.uint8)


@nb.njit(inline="always")
def _vmin(out, p, q, n):
    for j in range(n):
        out[j] = min(p[j], q[j])


@nb.njit(inline="always")
def _vmax(out, p, q, n):
    for j in range(n):
        out[j] = max(p[j], q[j])


@nb.njit(inline="always")
def _best_arc(diff, a, b, best, n):
    # best[j] = max over 16 rotations of min over 9 consecutive entries
    for i in range(16):
        _vmin(a[i], diff[i], diff[(i + 1) & 15], n)
    for i in range(16):
        _vmin(b[i], a[i], a[(i + 2) & 15], n)
    for i in range(16):
        _vmin(a[i], b[i], b[(i + 4) & 15], n)
    _vmin(best, a[0], diff[8], n)
    for i in range(1, 16):
        _vmin(b[0], a[i], diff[(i + 8) & 15], n)
        _vmax(best, best, b[0], n)


@nb.njit(cache=True, boundscheck=False, nogil=True)
def score_span(rows, yc, x0, n, t, scratch, out_score, out_pol):
    """Score columns ``x0 .. x0+n-1`` of row ``yc`` of ``rows``.

    Requires rows ``yc-3 .. yc+3`` and columns ``x0-3 .. x0+n+2``. Writes the
    score (0 unless it exceeds ``t``) and polarity into ``out_*[x0:x0+n]`` and
    returns how many of them are nonzero.
    """
    if n <= 0:
        return 0
    bright = scratch[_BRIGHT:_BRIGHT + 16]
    dark = scratch[_DARK:_DARK + 16]
    a = scratch[_A:_A + 16]
    b = scratch[_B:_B + 16]
    bb = scratch[_BEST_BRIGHT]
    bd = scratch[_BEST_DARK]
    c = rows[yc, x0:x0 + n]
    for i in range(16):
        r = rows[yc + RING_DY[i], x0 + RING_DX[i]:x0 + RING_DX[i] + n]
        bi = bright[i]
        di = dark[i]
        for j in range(n):
            bi[j] = max(r[j], c[j]) - c[j]
            di[j] = c[j] - min(r[j], c[j])
    _best_arc(bright, a, b, bb, n)
    _best_arc(dark, a, b, bd, n)
    hits = 0
    for j in range(n):
        sb = bb[j]
        sd = bd[j]
        if sb > t:
            out_score[x0 + j] = sb
            out_pol[x0 + j] = 0
            hits += 1
        elif sd > t:
            out_score[x0 + j] = sd
            out_pol[x0 + j] = 1
            hits += 1
        else:
            out_score[x0 + j] = 0
            out_pol[x0 + j] = 0
    return hits


@nb.njit(cache=True, nogil=True)
def score_frame(img, t, scores, pols):
    h, w = img.shape
    scratch = np.empty((SCRATCH_ROWS, w), dtype=np.uint8)
    for y in range(3, h - 3):
        score_span(img, y, 3, w - 6, t, scratch, scores[y], pols[y])


@nb.njit(cache=True, boundscheck=False, nogil=True)
def suppress_row(prev, cur, nxt, keep):
    """keep[x] = 1 iff cur[x] > 0 and strictly exceeds its 8 neighbours.

    Neighbours outside the row are treated as zero; pass a zero row for a
    missing ``prev`` or ``nxt``.
    """
    w = cur.shape[0]
    for x in range(1, w - 1):
        s = cur[x]
        ok = (s > 0) & (s > cur[x - 1]) & (s > cur[x + 1]) \
            & (s > prev[x - 1]) & (s > prev[x]) & (s > prev[x + 1]) \
            & (s > nxt[x - 1]) & (s > nxt[x]) & (s > nxt[x + 1])
        keep[x] = ok
    for x in (0, w - 1):
        if x >= w:
            continue
        s = cur[x]
        ok = s > 0
        for dx in (-1, 0, 1):
            xx = x + dx
            if 0 <= xx < w:
                if dx != 0 and s <= cur[xx]:
                    ok = False
                if s <= prev[xx] or s <= nxt[xx]:
                    ok = False
        keep[x] = ok


@nb.njit(cache=True, nogil=True)
def suppress_frame(scores, pols):
    """Return (x, y, score, polarity) arrays of the 3x3 strict local maxima."""
    h, w = scores.shape
    zero = np.zeros(w, dtype=scores.dtype)
    keep = np.zeros((h, w), dtype=np.uint8)
    count = 0
    for y in range(h):
        prev = scores[y - 1] if y > 0 else zero
        nxt = scores[y + 1] if y < h - 1 else zero
        suppress_row(prev, scores[y], nxt, keep[y])
        for x in range(w):
            count += keep[y, x]
    xs = np.empty(count, dtype=np.uint16)
    ys = np.empty(count, dtype=np.uint16)
    ss = np.empty(count, dtype=np.uint16)
    ps = np.empty(count, dtype=np.uint8)
    k = 0
    for y in range(h):
        for x in range(w):
            if keep[y, x]:
                xs[k] = x
                ys[k] = y
                ss[k] = scores[y, x]
                ps[k] = pols[y, x]
                k += 1
    return xs, ys, ss, ps
