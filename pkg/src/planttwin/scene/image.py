"""RGB raster I/O. PPM (P6) is the golden-test format: bit-exact and
trivially parseable. PNG is accepted on ingest and served on request."""
from __future__ import annotations

import io

import numpy as np
from PIL import Image

from planttwin.errors import MalformedImage

PPM_MIME = "image/x-portable-pixmap"
PNG_MIME = "image/png"


def validate_raster(image: np.ndarray) -> np.ndarray:
    arr = np.asarray(image)
    if arr.ndim != 3 or arr.shape[2] != 3 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise MalformedImage(f"expected (h, w, 3) raster, got shape {arr.shape}")
    if arr.dtype != np.uint8:
        raise MalformedImage(f"expected uint8 raster, got {arr.dtype}")
    return arr


def encode_ppm(image: np.ndarray) -> bytes:
    arr = validate_raster(image)
    h, w = arr.shape[:2]
    return f"P6\n{w} {h}\n255\n".encode("ascii") + arr.tobytes()


def decode_ppm(data: bytes) -> np.ndarray:
    tokens = []
    pos = 0
    while len(tokens) < 4 and pos < len(data):
        ch = data[pos:pos + 1]
        if ch == b"#":  # comment to end of line
            pos = data.find(b"\n", pos)
            if pos < 0:
                break
            pos += 1
        elif ch.isspace():
            pos += 1
        else:
            end = pos
            while end < len(data) and not data[end:end + 1].isspace():
                end += 1
            tokens.append(data[pos:end])
            pos = end
    if len(tokens) != 4 or tokens[0] != b"P6":
        raise MalformedImage("not a binary PPM (P6) image")
    try:
        w, h, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    except ValueError as exc:
        raise MalformedImage(f"bad PPM header: {exc}") from exc
    if maxval != 255:
        raise MalformedImage(f"only 8-bit PPM supported, maxval={maxval}")
    pos += 1  # single whitespace byte after maxval
    pixels = data[pos:pos + w * h * 3]
    if len(pixels) != w * h * 3 or w < 1 or h < 1:
        raise MalformedImage("PPM payload truncated or empty")
    return np.frombuffer(pixels, dtype=np.uint8).reshape(h, w, 3).copy()


def encode_png(image: np.ndarray) -> bytes:
    arr = validate_raster(image)
    buf = io.BytesIO()
    Image.fromarray(arr, mode="RGB").save(buf, format="PNG")
    return buf.getvalue()


def decode_png(data: bytes) -> np.ndarray:
    try:
        with Image.open(io.BytesIO(data)) as img:
            return np.asarray(img.convert("RGB"), dtype=np.uint8).copy()
    except Exception as exc:
        raise MalformedImage(f"cannot decode PNG: {exc}") from exc


def decode_image(data: bytes) -> np.ndarray:
    """Sniff PPM vs PNG by magic bytes and decode accordingly."""
    if data[:2] == b"P6":
        return decode_ppm(data)
    if data[:8] == b"\x89PNG\r\n\x1a\n":
        return decode_png(data)
    raise MalformedImage("unrecognized image format (want P6 PPM or PNG)")
