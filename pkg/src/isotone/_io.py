"""Shared text-output helpers: atomic writes and numeric formatting."""

from __future__ import annotations

import os
import tempfile
from pathlib import Path


def atomic_write_text(path: "str | Path", text: str) -> None:
    """Write text to path via a temp file in the same directory plus rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def fmt(value: float, round_digits: "int | None" = None) -> str:
    """Format a float at full double precision, or rounded when requested."""
    if round_digits is None:
        return repr(float(value))
    return f"{value:.{round_digits}f}"
