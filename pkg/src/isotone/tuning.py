"""Tuning analysis: cents conversions, ratio statistics and isotonic scales.

An isotonic scale divides its period (ratio r_p, usually close to an
octave) into p equal steps in log-frequency, so the ratio between bars a
distance s apart is r_p**(s/p).  Fitting takes the mean measured ratio at
the candidate period distance as r_p and classifies the period as the
candidate whose r_p lies closest to 2, the octave-like organizing ratio.
"""

from __future__ import annotations

import csv
import io
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from ._io import atomic_write_text, fmt

CENT = 2.0 ** (1.0 / 1200.0)
A4_HZ = 440.0

TRADITIONAL = "traditional"
TEMPERED = "tempered"

DEFAULT_CANDIDATE_PERIODS = (7, 8, 9)

_NOTE_OFFSETS = {"C": 0, "D": 2, "E": 4, "F": 5, "G": 7, "A": 9, "B": 11}
_NOTE_RE = re.compile(r"^([A-Ga-g])([#b♯♭]*)(-?\d+)$")


def cents_to_ratio(cents: float) -> float:
    """Frequency ratio spanned by a signed number of cents."""
    if not math.isfinite(cents):
        raise ValueError(f"cents must be finite, got {cents}")
    return 2.0 ** (cents / 1200.0)


def ratio_to_cents(ratio: float) -> float:
    """Signed cents spanned by a frequency ratio."""
    if ratio <= 0.0 or not math.isfinite(ratio):
        raise ValueError(f"ratio must be positive and finite, got {ratio}")
    return 1200.0 * math.log2(ratio)


def reconstruct_frequency(tempered_hz: float, deviation_cents: float) -> float:
    """Real frequency from a tempered reference pitch and its cents deviation."""
    if tempered_hz <= 0.0:
        raise ValueError(f"tempered frequency must be positive, got {tempered_hz}")
    return tempered_hz * cents_to_ratio(deviation_cents)


def semitone_size(ratio: float) -> int:
    """Nearest equal-tempered semitone count for a frequency ratio.

    Half-integer boundaries round away from zero.
    """
    if ratio <= 0.0:
        raise ValueError(f"ratio must be positive, got {ratio}")
    x = 12.0 * math.log2(ratio)
    return int(math.floor(x + 0.5)) if x >= 0.0 else int(math.ceil(x - 0.5))


def note_frequency(name: str) -> float:
    """Equal-tempered frequency of a note in scientific pitch notation (A4 = 440)."""
    m = _NOTE_RE.match(name.strip())
    if m is None:
        raise ValueError(f"cannot parse note name: {name!r}")
    letter, accidentals, octave = m.groups()
    semis = _NOTE_OFFSETS[letter.upper()]
    for ch in accidentals:
        semis += 1 if ch in "#♯" else -1
    midi = 12 * (int(octave) + 1) + semis
    return A4_HZ * 2.0 ** ((midi - 69) / 12.0)


@dataclass(frozen=True)
class TuningRecord:
    """Bar fundamentals of one instrument, low to high; None marks a bar
    whose fundamental could not be identified."""

    id: str
    maker: str = ""
    place: str = ""
    kind: str = TRADITIONAL
    fundamentals: "tuple[float | None, ...]" = ()

    def __post_init__(self) -> None:
        kind = self.kind.strip().lower()
        if kind not in (TRADITIONAL, TEMPERED):
            raise ValueError(f"kind must be 'traditional' or 'tempered', got {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        fundamentals = tuple(
            None if f is None else float(f) for f in self.fundamentals
        )
        present = [f for f in fundamentals if f is not None]
        if any(f <= 0.0 or not math.isfinite(f) for f in present):
            raise ValueError("fundamentals must be positive and finite")
        if any(b <= a for a, b in zip(present, present[1:])):
            raise ValueError("present fundamentals must be strictly increasing")
        object.__setattr__(self, "fundamentals", fundamentals)

    @property
    def num_bars(self) -> int:
        return len(self.fundamentals)

    @property
    def num_present(self) -> int:
        return sum(1 for f in self.fundamentals if f is not None)


@dataclass(frozen=True)
class RatioStats:
    """Summary of the frequency ratios observed at one bar distance."""

    distance: int
    count: int
    minimum: float
    maximum: float
    average: float
    sigma: float


@dataclass(frozen=True)
class IsotonicScale:
    """Fitted equal-step scale: ratio at distance s is period_ratio**(s/period_steps)."""

    period_steps: int
    period_ratio: float
    max_relative_error: float

    def __post_init__(self) -> None:
        if self.period_steps < 1:
            raise ValueError("period_steps must be at least 1")
        if self.period_ratio <= 1.0:
            raise ValueError("period_ratio must exceed 1")

    def predict(self, distance: int) -> float:
        """Theoretical frequency ratio at the given bar distance."""
        return self.period_ratio ** (distance / self.period_steps)


def _distance_ratios(record: TuningRecord, distance: int) -> list[float]:
    f = record.fundamentals
    return [
        f[i + distance] / f[i]
        for i in range(len(f) - distance)
        if f[i] is not None and f[i + distance] is not None
    ]


def ratio_table(record: TuningRecord, max_distance: int) -> list[RatioStats]:
    """Per-distance ratio statistics over all bar pairs with both bars present.

    Distances with no available pair are omitted.  sigma is the population
    standard deviation.
    """
    if max_distance < 1:
        raise ValueError("max_distance must be at least 1")
    if record.num_present < 2:
        raise ValueError(f"record {record.id!r} needs at least 2 identified bars")
    out = []
    for s in range(1, max_distance + 1):
        ratios = _distance_ratios(record, s)
        if not ratios:
            continue
        arr = np.asarray(ratios)
        out.append(
            RatioStats(
                distance=s,
                count=len(ratios),
                minimum=float(arr.min()),
                maximum=float(arr.max()),
                average=float(arr.mean()),
                sigma=float(arr.std()),
            )
        )
    return out


def fit_isotonic_from_averages(
    averages: Mapping[int, float],
    candidate_periods: Sequence[int] = DEFAULT_CANDIDATE_PERIODS,
) -> IsotonicScale:
    """Fit an isotonic scale to per-distance average ratios.

    The period ratio of candidate p is the average at distance p; the
    chosen period minimizes |r_p - 2| (ties favor the smaller period).
    max_relative_error compares predictions against the averages at every
    distance up to the period.
    """
    if not averages:
        raise ValueError("averages must not be empty")
    candidates = [p for p in sorted(set(candidate_periods)) if p in averages]
    if not candidates:
        raise ValueError(
            f"no candidate period among {tuple(candidate_periods)} has ratio data"
        )
    best = min(candidates, key=lambda p: (abs(averages[p] - 2.0), p))
    r = float(averages[best])
    errors = scale_prediction_errors(best, r, averages)
    return IsotonicScale(
        period_steps=best,
        period_ratio=r,
        max_relative_error=max(errors.values()),
    )


def scale_prediction_errors(
    period_steps: int,
    period_ratio: float,
    averages: Mapping[int, float],
    decimals: "int | None" = None,
) -> dict[int, float]:
    """Relative error of scale predictions against empirical averages.

    Only distances up to the period enter.  decimals rounds predictions to
    display precision first, matching comparisons against printed tables.
    """
    errors = {}
    for s, avg in averages.items():
        if s > period_steps:
            continue
        pred = period_ratio ** (s / period_steps)
        if decimals is not None:
            pred = round(pred, decimals)
        errors[s] = abs(pred - avg) / avg
    return errors


def fit_isotonic(
    record: TuningRecord,
    candidate_periods: Sequence[int] = DEFAULT_CANDIDATE_PERIODS,
    geometric: bool = False,
) -> IsotonicScale:
    """Fit an isotonic scale to a tuning record.

    geometric=True estimates per-distance averages with the geometric mean
    instead of the arithmetic mean used by the reference tables.
    """
    stats = ratio_table(record, max_distance=max(candidate_periods))
    if geometric:
        averages = {
            s.distance: float(
                math.exp(np.mean(np.log(_distance_ratios(record, s.distance))))
            )
            for s in stats
        }
    else:
        averages = {s.distance: s.average for s in stats}
    return fit_isotonic_from_averages(averages, candidate_periods)


# ---------------------------------------------------------------------------
# file formats


def save_tuning_record(record: TuningRecord, path: "str | Path") -> None:
    """Write the two-section tuning record CSV."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["id", "maker", "place", "kind"])
    w.writerow([record.id, record.maker, record.place, record.kind])
    w.writerow(["index", "frequency_hz"])
    for i, f in enumerate(record.fundamentals):
        w.writerow([i, "" if f is None else repr(float(f))])
    atomic_write_text(path, buf.getvalue())


def load_tuning_record(path: "str | Path") -> TuningRecord:
    """Read a tuning record CSV written by save_tuning_record.

    Layout: a metadata header row id,maker,place,kind and its value row,
    then bar rows index,frequency_hz (an optional second header line is
    accepted); an empty frequency marks a missing bar.
    """
    rows = [r for r in csv.reader(Path(path).read_text(encoding="utf-8").splitlines()) if r]
    if len(rows) < 2 or [c.strip().lower() for c in rows[0]] != ["id", "maker", "place", "kind"]:
        raise ValueError(f"{path}: expected header id,maker,place,kind")
    ident, maker, place, kind = (rows[1] + ["", "", "", ""])[:4]
    bars: "list[tuple[int, float | None]]" = []
    for row in rows[2:]:
        first = row[0].strip().lower()
        if first == "index":
            continue
        idx = int(row[0])
        text = row[1].strip() if len(row) > 1 else ""
        bars.append((idx, float(text) if text else None))
    bars.sort(key=lambda item: item[0])
    if bars and [i for i, _ in bars] != list(range(bars[0][0], bars[0][0] + len(bars))):
        raise ValueError(f"{path}: bar indices must be consecutive")
    return TuningRecord(
        id=ident,
        maker=maker,
        place=place,
        kind=kind or TRADITIONAL,
        fundamentals=tuple(f for _, f in bars),
    )


def load_cents_deviations(path: "str | Path") -> list[tuple[str, float]]:
    """Read rows of tempered_note_name,deviation_cents."""
    rows = [r for r in csv.reader(Path(path).read_text(encoding="utf-8").splitlines()) if r]
    if not rows or [c.strip().lower() for c in rows[0]] != ["tempered_note_name", "deviation_cents"]:
        raise ValueError(f"{path}: expected header tempered_note_name,deviation_cents")
    return [(r[0].strip(), float(r[1])) for r in rows[1:]]


def frequencies_from_cents(rows: Iterable[tuple[str, float]]) -> list[float]:
    """Reconstruct real frequencies from tempered note names plus deviations."""
    return [reconstruct_frequency(note_frequency(name), dev) for name, dev in rows]


def record_from_cents(
    rows: Iterable[tuple[str, float]],
    id: str,
    maker: str = "",
    place: str = "",
    kind: str = TRADITIONAL,
) -> TuningRecord:
    """Build a TuningRecord from note-plus-deviation rows."""
    return TuningRecord(
        id=id, maker=maker, place=place, kind=kind,
        fundamentals=tuple(frequencies_from_cents(rows)),
    )


def write_ratio_stats_csv(
    stats: Sequence[RatioStats],
    path: "str | Path",
    scale: "IsotonicScale | None" = None,
    round_digits: "int | None" = None,
) -> None:
    """CSV of per-distance statistics, with scale predictions when given."""
    header = "distance,count,min,max,avg,sigma"
    if scale is not None:
        header += ",predicted"
    lines = [header]
    for s in stats:
        row = (
            f"{s.distance},{s.count},{fmt(s.minimum, round_digits)},"
            f"{fmt(s.maximum, round_digits)},{fmt(s.average, round_digits)},"
            f"{fmt(s.sigma, round_digits)}"
        )
        if scale is not None:
            row += f",{fmt(scale.predict(s.distance), round_digits)}"
        lines.append(row)
    atomic_write_text(path, "\n".join(lines) + "\n")
