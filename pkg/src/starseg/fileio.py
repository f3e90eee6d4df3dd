"""Encoding and decoding of images, masks, overlays and metric reports.

Everything here works on ``bytes``; touching the file system is left to the
caller.

Grayscale input is normalized to ``[0, 1]`` by dividing by the file's
maximum value (``maxval`` for PNM, 255 for PNG).  Output is 8-bit,
``floor(255 * clip(v, 0, 1) + 0.5)``, i.e. round half away from zero.

Supported formats:

* PGM, plain (``P2``) and raw (``P5``), 8 or 16 bit;
* PPM raw (``P6``), for overlays;
* 8-bit grayscale or RGB PNG (through Pillow).
"""

import csv
import io
import re
from dataclasses import dataclass

import numpy as np

from .errors import (
    ImageParseError,
    InvalidImageError,
    MalformedHeaderError,
    TruncatedPayloadError,
    UnsupportedFormatError,
)

__all__ = [
    "CSV_HEADER",
    "ReportRow",
    "minmax_normalize",
    "quantize",
    "read_image",
    "read_mask",
    "read_rgb",
    "report_rows",
    "write_image",
    "write_mask",
    "write_metrics_csv",
    "write_overlay",
    "write_plane_csv",
]

PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"
_WHITESPACE = b" \t\n\r\v\f"
_CHANNELS = {b"P2": 1, b"P5": 1, b"P6": 3}


# --------------------------------------------------------------------------
# PNM decoding


def _skip_space(data, pos):
    while pos < len(data):
        ch = data[pos:pos + 1]
        if ch == b"#":
            while pos < len(data) and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
        elif ch in _WHITESPACE:
            pos += 1
        else:
            break
    return pos


def _header_int(data, pos, what):
    pos = _skip_space(data, pos)
    if pos >= len(data):
        raise MalformedHeaderError(f"header ends before {what}", pos)
    start = pos
    while pos < len(data) and data[pos:pos + 1].isdigit():
        pos += 1
    if pos == start or (pos < len(data) and data[pos:pos + 1] not in _WHITESPACE + b"#"):
        raise MalformedHeaderError(f"{what} is not a non-negative decimal integer", start)
    return int(data[start:pos]), pos


def _parse_pnm(data):
    magic = data[:2]
    if magic not in _CHANNELS:
        raise UnsupportedFormatError(f"unsupported magic {magic!r}", 0)
    if len(data) < 3 or data[2:3] not in _WHITESPACE + b"#":
        raise MalformedHeaderError("magic number must be followed by whitespace", 2)
    width, pos = _header_int(data, 2, "width")
    height, pos = _header_int(data, pos, "height")
    maxval, pos = _header_int(data, pos, "maxval")
    if width < 1 or height < 1:
        raise MalformedHeaderError(f"image size {width}x{height} is empty", pos)
    if not 1 <= maxval <= 65535:
        raise MalformedHeaderError(f"maxval {maxval} outside 1..65535", pos)
    channels = _CHANNELS[magic]
    count = width * height * channels

    if magic == b"P2":
        body = data[pos:]
        # blank out comments in place so match offsets stay valid
        body = re.sub(rb"#[^\r\n]*", lambda m: b" " * len(m.group()), body)
        tokens = re.finditer(rb"\S+", body)
        values = np.empty(count, dtype=np.int64)
        i = 0
        for m in tokens:
            if i == count:
                break
            tok = m.group()
            if not tok.isdigit():
                raise ImageParseError(f"sample {tok[:16]!r} is not an integer", pos + m.start())
            values[i] = int(tok)
            i += 1
        if i < count:
            raise TruncatedPayloadError(f"expected {count} samples, found {i}", len(data))
    else:
        if pos >= len(data) or data[pos:pos + 1] not in _WHITESPACE:
            raise MalformedHeaderError("maxval must be followed by one whitespace byte", pos)
        pos += 1
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        need = count * dtype.itemsize
        if len(data) - pos < need:
            raise TruncatedPayloadError(
                f"raster needs {need} bytes, only {len(data) - pos} present", len(data)
            )
        values = np.frombuffer(data, dtype=dtype, count=count, offset=pos).astype(np.int64)

    if values.max(initial=0) > maxval:
        raise ImageParseError(f"sample value exceeds maxval {maxval}")
    shape = (height, width) if channels == 1 else (height, width, 3)
    return magic, values.reshape(shape), maxval


# --------------------------------------------------------------------------
# PNG (Pillow)


def _png_array(data):
    from PIL import Image, UnidentifiedImageError

    try:
        with Image.open(io.BytesIO(data)) as im:
            mode = im.mode
            if mode not in ("L", "RGB"):
                raise UnsupportedFormatError(f"only 8-bit grayscale or RGB PNG is supported, got mode {mode}")
            arr = np.asarray(im)
    except (UnidentifiedImageError, OSError, SyntaxError, ValueError) as exc:
        if isinstance(exc, ImageParseError):
            raise
        raise ImageParseError(f"cannot decode PNG: {exc}") from exc
    return mode, arr


def _png_bytes(arr):
    from PIL import Image

    buf = io.BytesIO()
    Image.fromarray(arr).save(buf, format="PNG")
    return buf.getvalue()


# --------------------------------------------------------------------------
# readers


def read_image(data):
    """Decode a grayscale PGM or PNG into a float64 array in ``[0, 1]``.

    Raises
    ------
    UnsupportedFormatError
        Unknown magic, color image, or non-8-bit PNG.
    MalformedHeaderError, TruncatedPayloadError, ImageParseError
        Corrupt input; the message names the byte offset where possible.
    """
    data = bytes(data)
    if data.startswith(PNG_SIGNATURE):
        mode, arr = _png_array(data)
        if mode != "L":
            raise UnsupportedFormatError("expected a grayscale PNG, got RGB")
        return arr.astype(np.float64) / 255.0
    magic, values, maxval = _parse_pnm(data)
    if magic == b"P6":
        raise UnsupportedFormatError("P6 is a color format; use read_rgb", 0)
    return values.astype(np.float64) / maxval


def read_mask(data):
    """Decode a grayscale image as a boolean mask (foreground where value > 0.5)."""
    return read_image(data) > 0.5


def read_rgb(data):
    """Decode a P6 PPM or RGB PNG into a ``(H, W, 3)`` uint8 array.

    Samples are rescaled to 0..255 when the PPM maxval is not 255.
    """
    data = bytes(data)
    if data.startswith(PNG_SIGNATURE):
        mode, arr = _png_array(data)
        if mode != "RGB":
            raise UnsupportedFormatError("expected an RGB PNG")
        return arr.copy()
    magic, values, maxval = _parse_pnm(data)
    if magic != b"P6":
        raise UnsupportedFormatError(f"expected P6, got {magic!r}", 0)
    if maxval == 255:
        return values.astype(np.uint8)
    return quantize(values / maxval)


# --------------------------------------------------------------------------
# writers


def quantize(values):
    """Map ``[0, 1]`` floats to uint8 with clamping and round-half-up."""
    v = np.asarray(values, dtype=np.float64)
    if not np.all(np.isfinite(v)):
        raise InvalidImageError("cannot encode NaN or Inf")
    return np.floor(np.clip(v, 0.0, 1.0) * 255.0 + 0.5).astype(np.uint8)


def _check_2d(arr, what):
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InvalidImageError(f"{what} must be a non-empty 2D array, got shape {arr.shape}")


def _gray_bytes(pixels, fmt):
    h, w = pixels.shape
    if fmt in ("pgm", "pgm-binary", "P5"):
        return b"P5\n%d %d\n255\n" % (w, h) + pixels.tobytes()
    if fmt in ("pgm-ascii", "P2"):
        lines = [b"P2", b"%d %d" % (w, h), b"255"]
        lines += [" ".join(map(str, row)).encode("ascii") for row in pixels.tolist()]
        return b"\n".join(lines) + b"\n"
    if fmt == "png":
        return _png_bytes(pixels)
    raise ValueError(f"unknown grayscale format {fmt!r}; use pgm, pgm-ascii or png")


def write_image(img, fmt="pgm"):
    """Encode a ``[0, 1]`` grayscale image as 8-bit PGM (raw or plain) or PNG."""
    arr = np.asarray(img, dtype=np.float64)
    _check_2d(arr, "image")
    return _gray_bytes(quantize(arr), fmt)


def write_mask(mask, fmt="pgm"):
    """Encode a boolean mask with foreground 255 and background 0."""
    m = np.asarray(mask)
    _check_2d(m, "mask")
    return _gray_bytes(np.where(m.astype(bool), 255, 0).astype(np.uint8), fmt)


def write_overlay(rgb, fmt="ppm"):
    """Encode an ``(H, W, 3)`` uint8 overlay as raw PPM (P6) or RGB PNG."""
    arr = np.asarray(rgb)
    if arr.ndim != 3 or arr.shape[2] != 3 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InvalidImageError(f"overlay must have shape (H, W, 3), got {arr.shape}")
    arr = np.ascontiguousarray(arr, dtype=np.uint8)
    if fmt in ("ppm", "P6"):
        h, w = arr.shape[:2]
        return b"P6\n%d %d\n255\n" % (w, h) + arr.tobytes()
    if fmt == "png":
        return _png_bytes(arr)
    raise ValueError(f"unknown overlay format {fmt!r}; use ppm or png")


def minmax_normalize(plane):
    """Stretch a plane to ``[0, 1]`` for display; a constant plane maps to 0."""
    p = np.asarray(plane, dtype=np.float64)
    lo, hi = p.min(), p.max()
    if not hi > lo:
        return np.zeros_like(p)
    return (p - lo) / (hi - lo)


def write_plane_csv(plane):
    """Raw plane values, one image row per line, 17 significant digits."""
    buf = io.StringIO()
    np.savetxt(buf, np.asarray(plane, dtype=np.float64), fmt="%.17g", delimiter=",")
    return buf.getvalue().encode("utf-8")


# --------------------------------------------------------------------------
# metric reports

CSV_HEADER = ("image", "level", "tp", "fp", "fn", "tn",
              "precision", "recall", "accuracy", "f1", "chosen")


@dataclass(frozen=True)
class ReportRow:
    image: str
    level: int
    tp: int
    fp: int
    fn: int
    tn: int
    precision: float
    recall: float
    accuracy: float
    f1: float
    chosen: bool = False


def report_rows(image_id, entries, chosen_level=None):
    """Turn sweep entries into report rows, flagging ``chosen_level``."""
    rows = []
    for e in entries:
        c, m = e.counts, e.metrics
        rows.append(ReportRow(image_id, e.level, c.tp, c.fp, c.fn, c.tn,
                              m.precision, m.recall, m.accuracy, m.f1,
                              chosen=e.level == chosen_level))
    return rows


def write_metrics_csv(rows):
    """UTF-8 CSV report sorted by ``(image, level)`` with LF line endings."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in sorted(rows, key=lambda r: (r.image, r.level)):
        writer.writerow([
            r.image, r.level, r.tp, r.fp, r.fn, r.tn,
            f"{r.precision:.6f}", f"{r.recall:.6f}", f"{r.accuracy:.6f}", f"{r.f1:.6f}",
            "true" if r.chosen else "false",
        ])
    return buf.getvalue().encode("utf-8")
