"""Plain-text observation blocks: one sensor per line, comma-separated ``a+bi`` entries."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .model import ObservationMatrix


class ObservationFormatError(ValueError):
    pass


def format_complex(z: complex) -> str:
    re, im = float(z.real), float(z.imag)
    sign = "-" if math.copysign(1.0, im) < 0 else "+"
    return f"{re!r}{sign}{abs(im)!r}i"


def parse_complex(field: str) -> complex:
    s = field.strip()
    if not s or s[-1] not in "ij" or any(ch.isspace() for ch in s):
        raise ValueError(f"not a complex entry: {field!r}")
    return complex(s[:-1] + "j")


def save_observation(Y, path) -> None:
    data = np.asarray(getattr(Y, "data", Y), dtype=complex)
    if data.ndim != 2:
        raise ValueError("observation must be 2-D")
    lines = [",".join(format_complex(z) for z in row) for row in data]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def load_observation(path) -> ObservationMatrix:
    """Read an N x T block; raises :class:`ObservationFormatError` with the line number."""
    rows = []
    width = None
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        fields = line.split(",")
        if width is None:
            width = len(fields)
        elif len(fields) != width:
            raise ObservationFormatError(f"line {lineno}: expected {width} entries, got {len(fields)}")
        try:
            rows.append([parse_complex(f) for f in fields])
        except ValueError as exc:
            raise ObservationFormatError(f"line {lineno}: {exc}") from None
    if not rows or not width:
        raise ObservationFormatError("empty observation file")
    return ObservationMatrix(np.array(rows, dtype=complex))
