"""Binary PGM (P5) reader and writer, 8-bit only."""
import re

import numpy as np

from ..errors import FormatError, UnsupportedFormatError
from ..image import GrayImage

MAGIC = b"P5"
_MAX_PIXELS = 1 << 31
_WS = b" \t\n\r\x0b\x0c"


def _tokens(data: bytes, count: int, pos: int):
    """Read ``count`` integer header tokens starting at ``pos``, skipping comments."""
    out = []
    while len(out) < count:
        while pos < len(data) and (data[pos] in _WS or data[pos] == ord("#")):
            if data[pos] == ord("#"):
                nl = data.find(b"\n", pos)
                pos = len(data) if nl < 0 else nl + 1
            else:
                pos += 1
        m = re.compile(rb"\d+").match(data, pos)
        if m is None:
            raise FormatError(f"malformed PGM header near byte {pos}")
        out.append(int(m.group()))
        pos = m.end()
    return out, pos


def read_pgm(data: bytes) -> GrayImage:
    data = bytes(data)
    if data[:2] != MAGIC:
        raise FormatError("not a binary PGM (missing P5 magic)")
    if len(data) < 3 or data[2] not in _WS:
        raise FormatError("malformed PGM header after magic")
    (width, height, maxval), pos = _tokens(data, 3, 2)
    if maxval > 255:
        raise UnsupportedFormatError(f"unsupported PGM depth: maxval {maxval}")
    if maxval < 1:
        raise FormatError("PGM maxval must be positive")
    if width < 1 or height < 1 or width * height > _MAX_PIXELS:
        raise FormatError(f"unsupported PGM dimensions {width}x{height}")
    if pos >= len(data) or data[pos] not in _WS:
        raise FormatError("PGM header must end with a single whitespace byte")
    pos += 1
    need = width * height
    raster = data[pos:]
    if len(raster) < need:
        raise FormatError(f"truncated PGM raster: {len(raster)} of {need} bytes")
    if len(raster) > need:
        raise FormatError(f"{len(raster) - need} trailing bytes after PGM raster")
    flat = np.frombuffer(raster, dtype=np.uint8)
    if maxval < 255 and flat.size and int(flat.max()) > maxval:
        raise FormatError("PGM sample exceeds declared maxval")
    return GrayImage(flat.reshape(height, width))


def write_pgm(img: GrayImage) -> bytes:
    return b"P5\n%d %d\n255\n" % (img.width, img.height) + img.tobytes()
