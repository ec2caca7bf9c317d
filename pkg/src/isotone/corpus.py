"""Harmonic-interval statistics over encoded performances.

Events carry an interval size in equal-tempered semitones and a duration
in beats.  Distributions are reported per semitone bin 1..12 plus a single
bucket for everything above the octave; unisons (size 0) are kept when
present but hidden from the table views.
"""

from __future__ import annotations

import csv
import math
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from ._io import atomic_write_text, fmt

# All sizes above one octave aggregate into this bucket key.
OVER_OCTAVE_BUCKET = 13
OVER_OCTAVE_LABEL = ">12"

TABLE_SIZES = tuple(range(1, 13)) + (OVER_OCTAVE_BUCKET,)

OCCURRENCE = "occurrence"
DURATION = "duration"
WEIGHTINGS = (OCCURRENCE, DURATION)


@dataclass(frozen=True)
class IntervalEvent:
    """One harmonic interval: size in semitones, duration in beats."""

    size: int
    duration: float

    def __post_init__(self) -> None:
        if self.size < 0:
            raise ValueError(f"interval size must be non-negative, got {self.size}")
        if not (self.duration > 0.0 and math.isfinite(self.duration)):
            raise ValueError(f"duration must be positive and finite, got {self.duration}")


@dataclass(frozen=True)
class Piece:
    """One encoded performance."""

    id: str
    musician: str = ""
    events: tuple[IntervalEvent, ...] = ()


def bucket(size: int) -> int:
    """Bin key for an interval size: identity up to 12, 13 for anything above."""
    return size if size <= 12 else OVER_OCTAVE_BUCKET


def size_label(key: int) -> str:
    return OVER_OCTAVE_LABEL if key == OVER_OCTAVE_BUCKET else str(key)


def _base_distribution(include_zero: bool) -> dict[int, float]:
    d = {s: 0.0 for s in TABLE_SIZES}
    if include_zero:
        d[0] = 0.0
    return dict(sorted(d.items()))


def occurrence_probabilities(piece: Piece) -> dict[int, float]:
    """Probability of each interval size by frequency of occurrence."""
    if not piece.events:
        raise ValueError(f"piece {piece.id!r} has no events")
    counts: defaultdict[int, int] = defaultdict(int)
    for ev in piece.events:
        counts[bucket(ev.size)] += 1
    total = len(piece.events)
    dist = _base_distribution(include_zero=0 in counts)
    for key, n in counts.items():
        dist[key] = n / total
    return dist


def duration_probabilities(piece: Piece) -> dict[int, float]:
    """Probability of each interval size weighted by total duration."""
    if not piece.events:
        raise ValueError(f"piece {piece.id!r} has no events")
    sums: defaultdict[int, float] = defaultdict(float)
    total = 0.0
    for ev in piece.events:
        sums[bucket(ev.size)] += ev.duration
        total += ev.duration
    dist = _base_distribution(include_zero=0 in sums)
    for key, t in sums.items():
        dist[key] = t / total
    return dist


def _piece_distribution(piece: Piece, weighting: str) -> dict[int, float]:
    if weighting == OCCURRENCE:
        return occurrence_probabilities(piece)
    if weighting == DURATION:
        return duration_probabilities(piece)
    raise ValueError(f"weighting must be one of {WEIGHTINGS}, got {weighting!r}")


def corpus_average(
    pieces: Sequence[Piece], weighting: str = OCCURRENCE, pooled: bool = False
) -> dict[int, float]:
    """Mean distribution over pieces (each piece weighted equally).

    pooled=True instead merges all events into one virtual piece before
    computing the distribution.
    """
    if not pieces:
        raise ValueError("at least one piece is required")
    if pooled:
        merged = Piece(
            id="pooled",
            events=tuple(ev for p in pieces for ev in p.events),
        )
        return _piece_distribution(merged, weighting)
    dists = [_piece_distribution(p, weighting) for p in pieces]
    keys = sorted({k for d in dists for k in d})
    return {k: sum(d.get(k, 0.0) for d in dists) / len(dists) for k in keys}


def events_from_timeline(
    rows: Iterable[tuple[float, float, int]]
) -> tuple[IntervalEvent, ...]:
    """Convert (onset, duration, size) note-pair rows into ordered events."""
    ordered = sorted(rows, key=lambda r: r[0])
    return tuple(IntervalEvent(size=int(s), duration=float(d)) for _, d, s in ordered)


# ---------------------------------------------------------------------------
# file formats


def save_piece(piece: Piece, path: "str | Path") -> None:
    lines = ["size_semitones,duration_beats"]
    for ev in piece.events:
        lines.append(f"{ev.size},{ev.duration!r}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def load_piece(path: "str | Path", id: str = "", musician: str = "") -> Piece:
    """Read an event CSV with header size_semitones,duration_beats."""
    rows = [r for r in csv.reader(Path(path).read_text(encoding="utf-8").splitlines()) if r]
    if not rows or [c.strip().lower() for c in rows[0]] != ["size_semitones", "duration_beats"]:
        raise ValueError(f"{path}: expected header size_semitones,duration_beats")
    events = tuple(IntervalEvent(size=int(r[0]), duration=float(r[1])) for r in rows[1:])
    return Piece(id=id or Path(path).stem, musician=musician, events=events)


def load_corpus_manifest(path: "str | Path") -> list[Piece]:
    """Read a manifest of id,piece-file lines; paths resolve relative to it.

    Blank lines and lines starting with '#' are ignored.
    """
    manifest = Path(path)
    pieces = []
    for ln, raw in enumerate(manifest.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        ident, _, rel = line.partition(",")
        if not rel:
            raise ValueError(f"{path}:{ln}: expected 'id,piece_file'")
        pieces.append(load_piece(manifest.parent / rel.strip(), id=ident.strip()))
    if not pieces:
        raise ValueError(f"{path}: manifest lists no pieces")
    return pieces


def write_interval_table_csv(
    pieces: Sequence[Piece],
    path: "str | Path",
    weighting: str = OCCURRENCE,
    round_digits: "int | None" = None,
) -> None:
    """Table-layout CSV: one row per interval size, one column per piece plus
    the corpus average.  Unisons are hidden from this view."""
    dists = [_piece_distribution(p, weighting) for p in pieces]
    avg = corpus_average(pieces, weighting)
    lines = ["interval_semitones," + ",".join(p.id for p in pieces) + ",avg"]
    for key in TABLE_SIZES:
        cells = [fmt(d.get(key, 0.0), round_digits) for d in dists]
        cells.append(fmt(avg.get(key, 0.0), round_digits))
        lines.append(f"{size_label(key)}," + ",".join(cells))
    atomic_write_text(path, "\n".join(lines) + "\n")
