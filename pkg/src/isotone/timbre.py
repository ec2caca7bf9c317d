"""Spectra of the instrument timbres the dissonance analysis consumes.

A Spectrum stores partials as ratios to the fundamental plus normalized
amplitudes, so a timbre is register-independent: it is instantiated at an
absolute base frequency only when dissonance is computed.

Presets:

* free-free rectangular bar (transverse modes 2.758, 5.406, 8.936,
  13.350, 18.645 times the fundamental)
* ideal harmonic series
* bar coupled to a closed-pipe resonator (bar modes merged with the odd
  harmonics of the pipe)
* a four-partial composite summarizing measured bar-and-resonator spectra

Mode ratios for the free-free bar follow Fletcher & Rossing, "The Physics
of Musical Instruments", 2nd ed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

BAR_OVERTONE_RATIOS = (2.758, 5.406, 8.936, 13.350, 18.645)
CLOSED_PIPE_OVERTONE_RATIOS = (3.0, 5.0, 7.0, 9.0, 11.0, 13.0, 15.0, 17.0)

# First-overtone amplitude and decay constant of the exponential model
# A_n = 0.16 * exp(-(n - 2.758)/5) fitted to averaged measured spectra.
EXPONENTIAL_A1 = 0.16
EXPONENTIAL_DECAY = 5.0
EXPONENTIAL_ANCHOR = 2.758

MEASURED_COMPOSITE_RATIOS = (1.0, 2.758, 5.0, 5.406)
MEASURED_COMPOSITE_AMPLITUDES = (1.0, 0.16, 0.13, 0.06)

AMPLITUDE_MODELS = ("equal", "exponential")


def exponential_overtone_amplitude(ratio_n: float) -> float:
    """Amplitude of an overtone at ratio n under the exponential decay model."""
    return EXPONENTIAL_A1 * math.exp(-(ratio_n - EXPONENTIAL_ANCHOR) / EXPONENTIAL_DECAY)


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Ordered partials of a timbre, relative to the fundamental.

    Invariants: ratios start at exactly 1.0 and increase strictly;
    amplitudes lie in [0, 1] with at least one equal to 1.
    """

    ratios: np.ndarray
    amplitudes: np.ndarray
    label: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        ratios = np.array(self.ratios, dtype=np.float64, order="C")
        amps = np.array(self.amplitudes, dtype=np.float64, order="C")
        if ratios.ndim != 1 or amps.ndim != 1:
            raise ValueError("ratios and amplitudes must be one-dimensional")
        if ratios.size == 0:
            raise ValueError("spectrum must contain at least one partial")
        if ratios.size != amps.size:
            raise ValueError("ratios and amplitudes must have equal length")
        if not np.all(np.isfinite(ratios)) or not np.all(np.isfinite(amps)):
            raise ValueError("spectrum values must be finite")
        if ratios[0] != 1.0:
            raise ValueError("first partial must be the fundamental (ratio 1.0)")
        if np.any(np.diff(ratios) <= 0.0):
            raise ValueError("partial ratios must be strictly increasing")
        if np.any(amps < 0.0) or np.any(amps > 1.0):
            raise ValueError("amplitudes must lie in [0, 1]")
        if amps.max() != 1.0:
            raise ValueError("amplitudes must be normalized (max exactly 1)")
        ratios.flags.writeable = False
        amps.flags.writeable = False
        object.__setattr__(self, "ratios", ratios)
        object.__setattr__(self, "amplitudes", amps)

    def __len__(self) -> int:
        return int(self.ratios.size)

    @property
    def partials(self) -> list[tuple[float, float]]:
        return list(zip(self.ratios.tolist(), self.amplitudes.tolist()))

    def frequencies(self, base_hz: float) -> np.ndarray:
        """Absolute partial frequencies for a fundamental at base_hz."""
        if base_hz <= 0.0:
            raise ValueError(f"base frequency must be positive, got {base_hz}")
        return base_hz * self.ratios

    @classmethod
    def from_partials(
        cls, pairs: "list[tuple[float, float]] | np.ndarray", label: str = ""
    ) -> "Spectrum":
        """Build a normalized Spectrum from (ratio, amplitude) pairs."""
        arr = np.asarray(pairs, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] == 0:
            raise ValueError("expected a non-empty sequence of (ratio, amplitude) pairs")
        order = np.argsort(arr[:, 0], kind="stable")
        ratios = arr[order, 0]
        amps = arr[order, 1]
        peak = amps.max() if amps.size else 0.0
        if peak <= 0.0:
            raise ValueError("at least one partial must have positive amplitude")
        return cls(ratios=ratios, amplitudes=amps / peak, label=label)


def _amplitudes_for(ratios: np.ndarray, model: str) -> np.ndarray:
    if model not in AMPLITUDE_MODELS:
        raise ValueError(f"amplitude model must be one of {AMPLITUDE_MODELS}, got {model!r}")
    if model == "equal":
        return np.ones_like(ratios)
    amps = np.array([1.0] + [exponential_overtone_amplitude(n) for n in ratios[1:]])
    return amps


def bar_spectrum(num_overtones: int = 5, equal_amplitudes: bool = True) -> Spectrum:
    """Free-free bar: fundamental plus the first num_overtones transverse modes.

    equal_amplitudes=False applies the exponential overtone decay model
    instead of unit amplitudes.
    """
    if not 1 <= num_overtones <= len(BAR_OVERTONE_RATIOS):
        raise ValueError(
            f"num_overtones must be in [1, {len(BAR_OVERTONE_RATIOS)}], got {num_overtones}"
        )
    ratios = np.array([1.0, *BAR_OVERTONE_RATIOS[:num_overtones]])
    amps = _amplitudes_for(ratios, "equal" if equal_amplitudes else "exponential")
    return Spectrum(ratios=ratios, amplitudes=amps, label="bar")


def harmonic_spectrum(num_partials: int = 6, equal_amplitudes: bool = True) -> Spectrum:
    """Ideal harmonic series with ratios 1..num_partials."""
    if num_partials < 1:
        raise ValueError(f"num_partials must be at least 1, got {num_partials}")
    ratios = np.arange(1, num_partials + 1, dtype=np.float64)
    amps = _amplitudes_for(ratios, "equal" if equal_amplitudes else "exponential")
    return Spectrum(ratios=ratios, amplitudes=amps, label="harmonic")


def bar_resonator_spectrum(amplitude_model: str = "exponential") -> Spectrum:
    """Bar coupled to a closed-pipe resonator tuned to the same fundamental.

    The overtone list is the sorted union of the bar transverse modes and
    the pipe's odd harmonics (closed pipes produce odd harmonics only).
    """
    overtones = sorted(BAR_OVERTONE_RATIOS + CLOSED_PIPE_OVERTONE_RATIOS)
    ratios = np.array([1.0, *overtones])
    amps = _amplitudes_for(ratios, amplitude_model)
    return Spectrum(ratios=ratios, amplitudes=amps, label="bar-resonator")


def experimental_spectrum(equal_amplitudes: bool = False) -> Spectrum:
    """Composite of the dominant measured partials (ratios 1, 2.758, 5.0, 5.406).

    Default amplitudes are the measured peak-height ratios 1 : 0.16 : 0.13
    : 0.06; the equal-amplitude variant mirrors low-register bars whose
    overtones rival the fundamental.
    """
    ratios = np.array(MEASURED_COMPOSITE_RATIOS)
    if equal_amplitudes:
        amps = np.ones_like(ratios)
    else:
        amps = np.array(MEASURED_COMPOSITE_AMPLITUDES)
    return Spectrum(ratios=ratios, amplitudes=amps, label="experimental")


PRESETS = {
    "bar": bar_spectrum,
    "harmonic": harmonic_spectrum,
    "bar-resonator": bar_resonator_spectrum,
    "experimental": experimental_spectrum,
}


def save_spectrum(spectrum: Spectrum, path: "str | Path") -> None:
    """Write a two-column text record: ratio and amplitude, one partial per line."""
    lines = [f"{r!r} {a!r}" for r, a in spectrum.partials]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_spectrum(path: "str | Path", label: str = "") -> Spectrum:
    """Read a two-column text record written by save_spectrum.

    Blank lines and lines starting with '#' are ignored; columns may be
    separated by whitespace or a comma.
    """
    pairs = []
    for ln, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.replace(",", " ").split()
        if len(parts) != 2:
            raise ValueError(f"{path}:{ln}: expected two columns, got {len(parts)}")
        pairs.append((float(parts[0]), float(parts[1])))
    if not pairs:
        raise ValueError(f"{path}: no partials found")
    return Spectrum.from_partials(pairs, label=label or Path(path).stem)
