"""Dissonance of full spectra and dissonance curves over the interval ratio.

The intrinsic dissonance of a complex tone sums the pair model over every
unordered pair of partials.  The two-tone dissonance at ratio alpha sums
over the merged set of both instantiations: the two intrinsic terms plus
the full cross sum between them (coincident partials contribute zero, so
no deduplication is applied).  Curves sample that quantity over a uniform
alpha grid and are normalized to [0, 1] by their own maximum; curve
families are normalized by the family-wide maximum so members stay
mutually comparable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from ._io import atomic_write_text, fmt
from .roughness import Model
from .timbre import Spectrum

DEFAULT_ALPHA_RANGE = (1.0, 2.3)
DEFAULT_ALPHA_STEP = 1e-3
DEFAULT_PROMINENCE = 0.01

MINIMUM = "minimum"
MAXIMUM = "maximum"

# Fraction of an extremum's prominence used as the re-ascent level when
# measuring its width.
WIDTH_LEVEL = 0.1


@dataclass(frozen=True, eq=False)
class DissonanceCurve:
    """Sampled dissonance-vs-alpha curve with its normalization retained."""

    base_frequency: float
    model: Model
    alphas: np.ndarray
    values: np.ndarray
    normalized_values: np.ndarray

    def __post_init__(self) -> None:
        alphas = np.asarray(self.alphas, dtype=np.float64)
        values = np.asarray(self.values, dtype=np.float64)
        normed = np.asarray(self.normalized_values, dtype=np.float64)
        if not (alphas.size == values.size == normed.size):
            raise ValueError("alphas, values and normalized_values must have equal length")
        if alphas.size < 2:
            raise ValueError("curve needs at least two samples")
        if alphas[0] < 1.0:
            raise ValueError("alpha grid must start at or above 1.0")
        if np.any(np.diff(alphas) <= 0.0):
            raise ValueError("alpha grid must be strictly increasing")
        if np.any(normed < 0.0) or np.any(normed > 1.0 + 1e-12):
            raise ValueError("normalized values must lie in [0, 1]")
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "normalized_values", normed)

    def __len__(self) -> int:
        return int(self.alphas.size)


@dataclass(frozen=True)
class Extremum:
    """A detected curve extremum.

    width is the alpha span at a re-ascent (re-descent for maxima) of 10%
    of the extremum's prominence, a sharpness proxy: broad minima have
    large widths.
    """

    kind: str
    alpha: float
    value: float
    width: float
    prominence: float = field(compare=False, default=0.0)


def intrinsic_dissonance(spectrum: Spectrum, base_frequency: float, model: Model) -> float:
    """Total dissonance of a single complex tone at the given fundamental.

    Pair weights follow the model: amplitudes for the 1993 and 2001 models,
    normalized Stevens-law loudness for the 2005 model (the loudness
    transform is monotone, so the kernels derive it from raw amplitudes).
    """
    freqs = spectrum.frequencies(base_frequency)
    return _kernels.total_dissonance(freqs, spectrum.amplitudes, model.value)


def two_tone_dissonance(
    spectrum: Spectrum, base_frequency: float, alpha: float, model: Model
) -> float:
    """Dissonance of two copies of the timbre with fundamentals in ratio alpha."""
    if alpha < 1.0:
        raise ValueError(f"alpha must be at least 1, got {alpha}")
    freqs = spectrum.frequencies(base_frequency)
    out = _kernels.two_tone_totals(
        freqs, spectrum.amplitudes, np.array([alpha]), model.value
    )
    return float(out[0])


def alpha_grid(
    alpha_range: Sequence[float] = DEFAULT_ALPHA_RANGE, step: float = DEFAULT_ALPHA_STEP
) -> np.ndarray:
    """Uniform alpha grid over [lo, hi] inclusive of both endpoints."""
    lo, hi = float(alpha_range[0]), float(alpha_range[1])
    if not (1.0 <= lo < hi):
        raise ValueError(f"alpha range must satisfy 1 <= lo < hi, got [{lo}, {hi}]")
    if step <= 0.0:
        raise ValueError(f"step must be positive, got {step}")
    n = int(np.floor((hi - lo) / step + 1e-9)) + 1
    if n < 2:
        raise ValueError("alpha range is degenerate for the given step")
    return lo + step * np.arange(n)


def _raw_curve(
    spectrum: Spectrum, base_frequency: float, alphas: np.ndarray, model: Model
) -> np.ndarray:
    freqs = spectrum.frequencies(base_frequency)
    return _kernels.two_tone_totals(freqs, spectrum.amplitudes, alphas, model.value)


def sample_curve(
    spectrum: Spectrum,
    base_frequency: float,
    alpha_range: Sequence[float] = DEFAULT_ALPHA_RANGE,
    step: float = DEFAULT_ALPHA_STEP,
    model: Model = Model.SETHARES_1993,
) -> DissonanceCurve:
    """Sample the two-tone dissonance over a uniform grid, normalized to max 1."""
    alphas = alpha_grid(alpha_range, step)
    values = _raw_curve(spectrum, base_frequency, alphas, model)
    peak = values.max()
    if peak <= 0.0:
        raise ValueError("curve is identically zero; nothing to normalize")
    return DissonanceCurve(
        base_frequency=base_frequency,
        model=model,
        alphas=alphas,
        values=values,
        normalized_values=values / peak,
    )


def curve_family(
    spectrum: Spectrum,
    base_frequencies: Iterable[float],
    alpha_range: Sequence[float] = DEFAULT_ALPHA_RANGE,
    step: float = DEFAULT_ALPHA_STEP,
    model: Model = Model.SETHARES_1993,
) -> list[DissonanceCurve]:
    """One curve per base frequency, all normalized by the family-wide maximum."""
    bases = [float(b) for b in base_frequencies]
    if not bases:
        raise ValueError("at least one base frequency is required")
    if any(b <= 0.0 for b in bases):
        raise ValueError("base frequencies must be positive")
    alphas = alpha_grid(alpha_range, step)
    raw = [_raw_curve(spectrum, b, alphas, model) for b in bases]
    family_peak = max(v.max() for v in raw)
    if family_peak <= 0.0:
        raise ValueError("curve family is identically zero; nothing to normalize")
    return [
        DissonanceCurve(
            base_frequency=b,
            model=model,
            alphas=alphas,
            values=v,
            normalized_values=v / family_peak,
        )
        for b, v in zip(bases, raw)
    ]


def _plateau_candidates(y: np.ndarray) -> list[tuple[int, int, str]]:
    """Interior extremum candidates as (left, right, kind) plateau spans."""
    n = y.size
    out = []
    i = 1
    while i < n - 1:
        j = i
        while j + 1 < n and y[j + 1] == y[i]:
            j += 1
        if j >= n - 1:
            break
        left, right = y[i - 1], y[j + 1]
        if y[i] < left and y[i] < right:
            out.append((i, j, MINIMUM))
        elif y[i] > left and y[i] > right:
            out.append((i, j, MAXIMUM))
        i = j + 1
    return out


def _side_barrier(y: np.ndarray, start: int, direction: int, v: float, kind: str) -> float:
    """Extreme value of y walking from start until terrain passes the extremum."""
    barrier = v
    i = start
    if kind == MINIMUM:
        while 0 <= i < y.size and y[i] >= v:
            if y[i] > barrier:
                barrier = y[i]
            i += direction
    else:
        while 0 <= i < y.size and y[i] <= v:
            if y[i] < barrier:
                barrier = y[i]
            i += direction
    return barrier


def _cross_level(alphas: np.ndarray, y: np.ndarray, start: int, direction: int,
                 level: float, kind: str) -> float:
    """Alpha where the curve first re-crosses level, walking from start."""
    i = start
    while True:
        nxt = i + direction
        if nxt < 0 or nxt >= y.size:
            return float(alphas[i])
        crossed = y[nxt] >= level if kind == MINIMUM else y[nxt] <= level
        if crossed:
            y0, y1 = y[i], y[nxt]
            if y1 == y0:
                return float(alphas[nxt])
            t = (level - y0) / (y1 - y0)
            return float(alphas[i] + t * (alphas[nxt] - alphas[i]))
        i = nxt


def find_extrema(
    curve: DissonanceCurve, prominence: float = DEFAULT_PROMINENCE
) -> list[Extremum]:
    """Interior extrema of the normalized curve, filtered by prominence.

    Prominence is topographic: the smaller of the two barriers that must be
    climbed (descended, for maxima) before reaching deeper (higher) terrain
    or the curve boundary.  Strict extrema are refined by parabolic
    interpolation through the three bracketing samples; plateaus report
    their alpha midpoint unrefined.
    """
    if len(curve) < 3:
        raise ValueError("extremum detection needs at least three samples")
    alphas = curve.alphas
    y = curve.normalized_values
    results = []
    for left, right, kind in _plateau_candidates(y):
        v = float(y[left])
        barrier_l = _side_barrier(y, left - 1, -1, v, kind)
        barrier_r = _side_barrier(y, right + 1, +1, v, kind)
        if kind == MINIMUM:
            prom = min(barrier_l, barrier_r) - v
        else:
            prom = v - max(barrier_l, barrier_r)
        if prom < prominence:
            continue
        if left == right:
            k = left
            ym1, y0, yp1 = float(y[k - 1]), float(y[k]), float(y[k + 1])
            denom = ym1 - 2.0 * y0 + yp1
            alpha_ref = float(alphas[k])
            value_ref = y0
            if denom != 0.0:
                offset = 0.5 * (ym1 - yp1) / denom
                offset = float(np.clip(offset, -0.5, 0.5))
                h = float(alphas[k + 1] - alphas[k])
                alpha_ref = float(alphas[k]) + offset * h
                value_ref = y0 - 0.25 * (ym1 - yp1) * offset
        else:
            alpha_ref = float(0.5 * (alphas[left] + alphas[right]))
            value_ref = v
        level = v + WIDTH_LEVEL * prom if kind == MINIMUM else v - WIDTH_LEVEL * prom
        a_left = _cross_level(alphas, y, left, -1, level, kind)
        a_right = _cross_level(alphas, y, right, +1, level, kind)
        results.append(
            Extremum(
                kind=kind,
                alpha=alpha_ref,
                value=value_ref,
                width=a_right - a_left,
                prominence=prom,
            )
        )
    results.sort(key=lambda e: e.alpha)
    return results


def curve_derivative(curve: DissonanceCurve) -> np.ndarray:
    """d(normalized D)/d(alpha) as an (n, 2) array of (alpha, slope) rows.

    Central differences on interior samples, one-sided at the ends.
    """
    if len(curve) < 3:
        raise ValueError("derivative needs at least three samples")
    a = curve.alphas
    y = curve.normalized_values
    d = np.empty_like(y)
    d[0] = (y[1] - y[0]) / (a[1] - a[0])
    d[-1] = (y[-1] - y[-2]) / (a[-1] - a[-2])
    d[1:-1] = (y[2:] - y[:-2]) / (a[2:] - a[:-2])
    return np.column_stack([a, d])


def dissonance_at_steps(
    spectrum: Spectrum,
    base_frequency: float,
    scale,
    steps: Iterable[int],
    model: Model = Model.SETHARES_1993,
    grid_step: float = DEFAULT_ALPHA_STEP,
) -> list[tuple[int, float, float]]:
    """Normalized dissonance at the alphas an isotonic scale assigns to steps.

    scale provides period_steps p and period_ratio r; step s maps to
    alpha = r**(s/p).  Values are normalized against the curve maximum over
    a grid spanning the default range, extended to cover the largest
    requested alpha.
    """
    step_list = [int(s) for s in steps]
    if not step_list:
        raise ValueError("at least one step is required")
    if any(s < 1 for s in step_list):
        raise ValueError("steps must be at least 1")
    p = scale.period_steps
    r = scale.period_ratio
    alphas = np.array([r ** (s / p) for s in step_list])
    hi = max(DEFAULT_ALPHA_RANGE[1], float(alphas.max()) + 2 * grid_step)
    grid = alpha_grid((DEFAULT_ALPHA_RANGE[0], hi), grid_step)
    freqs = spectrum.frequencies(base_frequency)
    w = spectrum.amplitudes
    peak = _kernels.two_tone_totals(freqs, w, grid, model.value).max()
    raw = _kernels.two_tone_totals(freqs, w, alphas, model.value)
    return [
        (s, float(a), float(v / peak)) for s, a, v in zip(step_list, alphas, raw)
    ]


def write_curve_csv(curve: DissonanceCurve, path, round_digits: "int | None" = None) -> None:
    """Two-column CSV of the normalized curve."""
    lines = ["alpha,dissonance"]
    for a, v in zip(curve.alphas, curve.normalized_values):
        lines.append(f"{fmt(a, round_digits)},{fmt(v, round_digits)}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_extrema_csv(extrema: list[Extremum], path, round_digits: "int | None" = None) -> None:
    """CSV of detected extrema with kind, alpha, value and width columns."""
    lines = ["kind,alpha,value,width"]
    for e in extrema:
        lines.append(
            f"{e.kind},{fmt(e.alpha, round_digits)},{fmt(e.value, round_digits)},"
            f"{fmt(e.width, round_digits)}"
        )
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_derivative_csv(deriv: np.ndarray, path, round_digits: "int | None" = None) -> None:
    """CSV of (alpha, d dissonance / d alpha) rows."""
    lines = ["alpha,ddissonance_dalpha"]
    for a, d in deriv:
        lines.append(f"{fmt(a, round_digits)},{fmt(d, round_digits)}")
    atomic_write_text(path, "\n".join(lines) + "\n")
