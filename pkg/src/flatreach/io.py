"""Shape files: PGM masks (P2/P5) and polygon JSON.

A PGM pixel is inside when its value is >= 128. Row 0 of the file is the
top row of the image, which maps to the largest y; the grid origin is the
centre of the bottom-left pixel.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .exceptions import FormatError, ParseError
from .geometry import ClosedCurve, GridMask

THRESHOLD = 128
MAXVAL = 255


def _tokens(data: bytes, count: int, pos: int = 0):
    """Read ``count`` whitespace-separated header tokens, skipping # comments.

    Returns the tokens with their (line, byte offset) and the position just
    after the last token.
    """
    out = []
    n = len(data)
    while len(out) < count:
        while pos < n and data[pos : pos + 1].isspace():
            pos += 1
        if pos < n and data[pos : pos + 1] == b"#":
            while pos < n and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        if pos >= n:
            raise ParseError("unexpected end of file in header", line=data.count(b"\n", 0, pos) + 1, offset=pos)
        start = pos
        while pos < n and not data[pos : pos + 1].isspace() and data[pos : pos + 1] != b"#":
            pos += 1
        out.append((data[start:pos], data.count(b"\n", 0, start) + 1, start))
    return out, pos


def _int_token(tok) -> int:
    text, line, off = tok
    try:
        value = int(text)
    except ValueError:
        raise ParseError(f"expected an integer, got {text[:20]!r}", line=line, offset=off) from None
    if value < 0:
        raise ParseError(f"negative value {value}", line=line, offset=off)
    return value


def parse_pgm(data: bytes) -> np.ndarray:
    """Decode P2 or P5 bytes to a (rows, cols) integer array."""
    if len(data) < 2 or data[:1] != b"P" or data[1:2] not in (b"2", b"5"):
        raise ParseError("not a P2/P5 PGM file (bad magic number)", line=1, offset=0)
    binary = data[1:2] == b"5"
    header, pos = _tokens(data, 3, 2)
    width, height, maxval = (_int_token(t) for t in header)
    if width == 0 or height == 0:
        raise ParseError("image has zero size", line=header[0][1], offset=header[0][2])
    if not 0 < maxval < 65536:
        raise ParseError(f"maxval {maxval} out of range", line=header[2][1], offset=header[2][2])
    count = width * height
    if binary:
        # exactly one whitespace byte separates the header from the raster
        if pos >= len(data) or not data[pos : pos + 1].isspace():
            raise ParseError("missing whitespace after header", offset=pos)
        pos += 1
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        need = count * dtype.itemsize
        if len(data) - pos < need:
            raise ParseError(f"raster truncated: need {need} bytes, have {len(data) - pos}", offset=len(data))
        values = np.frombuffer(data, dtype=dtype, count=count, offset=pos).astype(np.int64)
    else:
        toks, _ = _tokens(data, count, pos) if count else ([], pos)
        values = np.array([_int_token(t) for t in toks], dtype=np.int64)
    bad = np.flatnonzero(values > maxval)
    if bad.size:
        raise ParseError(f"pixel value {values[bad[0]]} exceeds maxval {maxval}", offset=None)
    return values.reshape(height, width)


def read_pgm(path, spacing: float = 1.0, origin=(0.0, 0.0)) -> GridMask:
    """Load a PGM file as a mask (value >= 128 is inside)."""
    img = parse_pgm(Path(path).read_bytes())
    return GridMask(img[::-1] >= THRESHOLD, spacing, origin)


def write_pgm(path, mask: GridMask, binary: bool = True) -> None:
    """Save a mask as a PGM (inside = 255, outside = 0)."""
    img = np.where(mask.cells[::-1], MAXVAL, 0).astype(np.uint8)
    h, w = img.shape
    header = f"P{5 if binary else 2}\n{w} {h}\n{MAXVAL}\n".encode()
    if binary:
        body = img.tobytes()
    else:
        body = "".join(" ".join(str(v) for v in row) + "\n" for row in img).encode()
    Path(path).write_bytes(header + body)


def parse_polygon(text: str) -> ClosedCurve:
    """Decode ``{"vertices": [[x, y], ...], "closed": true}``."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise ParseError(f"invalid JSON: {err.msg}", line=err.lineno, offset=err.pos) from None
    if not isinstance(doc, dict) or "vertices" not in doc:
        raise FormatError('polygon JSON must be an object with a "vertices" list')
    if doc.get("closed") is not True:
        raise FormatError('polygon must be marked "closed": true')
    verts = doc["vertices"]
    if not isinstance(verts, list) or len(verts) < 3:
        raise FormatError("polygon needs at least 3 vertices")
    out = []
    for k, v in enumerate(verts):
        ok = (
            isinstance(v, list)
            and len(v) == 2
            and all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in v)
        )
        if not ok or not all(math.isfinite(c) for c in v):
            raise FormatError(f"vertex {k} is not a pair of finite reals")
        out.append([float(v[0]), float(v[1])])
    return ClosedCurve(np.array(out))


def read_polygon(path) -> ClosedCurve:
    return parse_polygon(Path(path).read_text())


def write_polygon(path, curve: ClosedCurve) -> None:
    # repr round-trips floats exactly
    doc = {"vertices": [[float(x), float(y)] for x, y in curve.vertices], "closed": True}
    Path(path).write_text(json.dumps(doc) + "\n")
