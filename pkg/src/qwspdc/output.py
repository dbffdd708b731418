"""Deterministic CSV, PGM and sidecar-metadata writers."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np


def fmt(value) -> str:
    """Shortest round-trip decimal for floats; '' for None."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if math.isnan(value):
        return "nan"
    return repr(value)


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def write_text(path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def read_csv_matrix(path) -> tuple[list[str], np.ndarray]:
    """Inverse of writing a numeric matrix with a header row."""
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array([[float(v) for v in r] for r in rows[1:]])


def to_u8(values: np.ndarray) -> tuple[np.ndarray, float, float]:
    """Min-max normalise finite values to 0..255; non-finite cells map to 0."""
    finite = np.isfinite(values)
    if not finite.any():
        return np.zeros(values.shape, dtype=np.uint8), float("nan"), float("nan")
    lo, hi = float(values[finite].min()), float(values[finite].max())
    scaled = np.zeros(values.shape)
    if hi > lo:
        scaled[finite] = (values[finite] - lo) / (hi - lo) * 255.0
    return np.rint(scaled).astype(np.uint8), lo, hi


def pgm_bytes(pixels: np.ndarray) -> bytes:
    """Binary (P5) 8-bit greyscale image; row 0 is the top of the image."""
    pixels = np.ascontiguousarray(pixels, dtype=np.uint8)
    height, width = pixels.shape
    return f"P5\n{width} {height}\n255\n".encode("ascii") + pixels.tobytes()


def read_pgm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    magic, dims, maxval, rest = data.split(b"\n", 3)
    if magic != b"P5" or maxval != b"255":
        raise ValueError(f"{path}: not an 8-bit binary PGM")
    width, height = (int(v) for v in dims.split())
    return np.frombuffer(rest, dtype=np.uint8).reshape(height, width)


def sidecar_text(meta: dict) -> str:
    return json.dumps(meta, indent=2, sort_keys=True, allow_nan=True) + "\n"
