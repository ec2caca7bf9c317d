"""Pair-wise sensory dissonance models for two pure tones.

Three published parameterizations of the Plomp & Levelt (1965) roughness
curve are provided:

* Sethares (1993): d = a_max * a_min * [exp(-b1*s*df) - exp(-b2*s*df)]
* Vassilakis (2001): adds intensity and amplitude-fluctuation terms
* Sethares (2005): weights the same envelope by the smaller loudness

with b1 = 3.5, b2 = 5.75 and the bandwidth scaling s = 0.24/(0.0207*f + 18.96)
evaluated at the lower of the two frequencies, so the result is symmetric in
argument order.  A Stevens-law loudness approximation (exponent 0.60) backs
the 2005 model.

References: Sethares, JASA 94(3), 1993; Sethares, "Tuning, Timbre, Spectrum,
Scale", 2nd ed., 2005; Vassilakis, PhD dissertation, UCLA, 2001.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from . import _kernels

STEVENS_EXPONENT = 0.60
REFERENCE_PRESSURE_PA = 20e-6


class Model(enum.Enum):
    """Selects one of the three pair-dissonance parameterizations."""

    SETHARES_1993 = _kernels.MODEL_SETHARES_1993
    VASSILAKIS_2001 = _kernels.MODEL_VASSILAKIS_2001
    SETHARES_2005 = _kernels.MODEL_SETHARES_2005

    @classmethod
    def from_name(cls, name: str) -> "Model":
        key = name.strip().lower().replace("-", "").replace("_", "")
        table = {
            "sethares1993": cls.SETHARES_1993,
            "vassilakis2001": cls.VASSILAKIS_2001,
            "sethares2005": cls.SETHARES_2005,
        }
        if key not in table:
            raise ValueError(f"unknown dissonance model: {name!r}")
        return table[key]

    @property
    def cli_name(self) -> str:
        return self.name.replace("_", "").lower()


@dataclass(frozen=True)
class RoughnessConstants:
    """Envelope constants of the roughness curve.

    b2 > b1 > 0 is required, otherwise exp(-b1*x) - exp(-b2*x) is not a
    single-humped positive function of x >= 0.
    """

    b1: float = _kernels.B1
    b2: float = _kernels.B2
    s_num: float = _kernels.S_NUM
    s_c1: float = _kernels.S_C1
    s_c2: float = _kernels.S_C2

    def __post_init__(self) -> None:
        if not (self.b2 > self.b1 > 0.0):
            raise ValueError("roughness constants require b2 > b1 > 0")

    def bandwidth_scale(self, f_min: float) -> float:
        """s evaluated at the lower tone frequency."""
        return self.s_num / (self.s_c1 * f_min + self.s_c2)

    def peak_offset(self) -> float:
        """Dimensionless location x* of the envelope maximum."""
        return math.log(self.b2 / self.b1) / (self.b2 - self.b1)


DEFAULT_CONSTANTS = RoughnessConstants()


@dataclass(frozen=True)
class ToneComponent:
    """One pure-tone component: frequency in Hz, normalized linear amplitude."""

    frequency: float
    amplitude: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.frequency) or self.frequency <= 0.0:
            raise ValueError(f"frequency must be finite and positive, got {self.frequency}")
        if not math.isfinite(self.amplitude) or self.amplitude < 0.0:
            raise ValueError(f"amplitude must be finite and non-negative, got {self.amplitude}")


def pair_dissonance(
    t1: ToneComponent,
    t2: ToneComponent,
    model: Model = Model.SETHARES_1993,
    constants: RoughnessConstants = DEFAULT_CONSTANTS,
) -> float:
    """Dissonance of two pure tones under the selected model.

    Symmetric in argument order; exactly zero at unison and whenever the
    smaller amplitude is zero.
    """
    if constants is DEFAULT_CONSTANTS:
        return _kernels.pair_term(
            t1.frequency, t2.frequency, t1.amplitude, t2.amplitude, model.value
        )
    f_min = min(t1.frequency, t2.frequency)
    df = abs(t1.frequency - t2.frequency)
    s = constants.bandwidth_scale(f_min)
    bracket = math.exp(-constants.b1 * s * df) - math.exp(-constants.b2 * s * df)
    a_min = min(t1.amplitude, t2.amplitude)
    a_max = max(t1.amplitude, t2.amplitude)
    if model is Model.SETHARES_1993:
        weight = a_min * a_max
    elif model is Model.VASSILAKIS_2001:
        tot = a_min + a_max
        if tot <= 0.0:
            return 0.0
        weight = 0.5 * (a_min * a_max) ** 0.1 * (2.0 * a_min / tot) ** 3.11
    else:
        weight = a_min ** STEVENS_EXPONENT
    return weight * bracket


def roughest_frequency_gap(f_min: float, constants: RoughnessConstants = DEFAULT_CONSTANTS) -> float:
    """Frequency difference (Hz) that maximizes pair dissonance above f_min."""
    if f_min <= 0.0:
        raise ValueError("f_min must be positive")
    return constants.peak_offset() / constants.bandwidth_scale(f_min)


def loudness_normalized(amplitude_norm: float) -> float:
    """Stevens-law loudness of a normalized amplitude, itself normalized to [0, 1]."""
    if not 0.0 <= amplitude_norm <= 1.0:
        raise ValueError(f"normalized amplitude must lie in [0, 1], got {amplitude_norm}")
    return amplitude_norm ** STEVENS_EXPONENT


def sound_pressure_level(amplitude: float) -> float:
    """SPL in dB of a sine with the given pressure amplitude in Pa."""
    if amplitude <= 0.0:
        raise ValueError(f"amplitude must be positive, got {amplitude}")
    p_e = amplitude / math.sqrt(2.0)
    return 20.0 * math.log10(p_e / REFERENCE_PRESSURE_PA)


def loudness_sones(amplitude: float) -> float:
    """Loudness in sones of a sine with pressure amplitude in Pa.

    Composes l = (1/16) * 2^(SPL/10) with SPL = 20*log10(P_e / P_ref) and
    P_e = a / sqrt(2); adding 10 dB doubles the result.  Equal-loudness
    contour corrections are deliberately not applied.
    """
    return (1.0 / 16.0) * 2.0 ** (sound_pressure_level(amplitude) / 10.0)
