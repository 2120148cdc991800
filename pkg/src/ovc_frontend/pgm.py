"""Binary PGM (P5, maxval 255) reading and writing."""

from __future__ import annotations

import re
from pathlib import Path

import numpy as np

from .core import BadImageFormat

_TOKEN = re.compile(rb"(?:\s|#[^\n]*\n?)*([^\s#]+)")


def parse_pgm(data: bytes) -> np.ndarray:
    pos = 0
    fields = []
    for _ in range(4):
        m = _TOKEN.match(data, pos)
        if not m:
            raise BadImageFormat("truncated PGM header")
        fields.append(m.group(1))
        pos = m.end()
    if fields[0] != b"P5":
        raise BadImageFormat(f"not a binary PGM (magic {fields[0]!r})")
    try:
        width, height, maxval = (int(f) for f in fields[1:])
    except ValueError:
        raise BadImageFormat("non-numeric PGM header field") from None
    if maxval != 255:
        raise BadImageFormat(f"only 8-bit PGM (maxval 255) is supported, got {maxval}")
    if width <= 0 or height <= 0:
        raise BadImageFormat(f"bad PGM size {width}x{height}")
    # exactly one whitespace byte separates the header from the raster
    if pos >= len(data) or not data[pos:pos + 1].isspace():
        raise BadImageFormat("missing whitespace after PGM header")
    pos += 1
    raster = data[pos:pos + width * height]
    if len(raster) != width * height:
        raise BadImageFormat(f"PGM raster has {len(raster)} bytes, expected {width * height}")
    return np.frombuffer(raster, dtype=np.uint8).reshape(height, width).copy()


def read_pgm(path: str | Path) -> np.ndarray:
    return parse_pgm(Path(path).read_bytes())


def write_pgm(path: str | Path, image: np.ndarray) -> None:
    image = np.asarray(image)
    if image.ndim != 2 or image.dtype != np.uint8:
        raise BadImageFormat("write_pgm needs a 2-D uint8 array")
    h, w = image.shape
    with open(path, "wb") as fh:
        fh.write(b"P5\n%d %d\n255\n" % (w, h))
        fh.write(np.ascontiguousarray(image).tobytes())
