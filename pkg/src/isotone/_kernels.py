"""Low-level pair-summation kernels behind the dissonance computations.

Two interchangeable backends compute identical quantities:

* a numba ``@njit`` backend (default when numba imports cleanly), and
* a vectorized numpy fallback.

Set ``ISOTONE_NO_NUMBA=1`` to force the numpy path.  ``ISOTONE_THREADS``
caps the numba threading layer (the kernels themselves are sequential, so
this is a hard upper bound, not a tuning knob).

Model ids: 0 = Sethares (1993), 1 = Vassilakis (2001), 2 = Sethares (2005)
with Stevens-law loudness weights.
"""

from __future__ import annotations

import math
import os

import numpy as np

B1 = 3.5
B2 = 5.75
S_NUM = 0.24
S_C1 = 0.0207
S_C2 = 18.96

MODEL_SETHARES_1993 = 0
MODEL_VASSILAKIS_2001 = 1
MODEL_SETHARES_2005 = 2

_NUMBA_DISABLED = os.environ.get("ISOTONE_NO_NUMBA", "").strip().lower() in {
    "1", "true", "yes", "on",
}

try:
    if _NUMBA_DISABLED:
        raise ImportError("numba disabled via ISOTONE_NO_NUMBA")
    import numba
    from numba import njit

    _thread_cap = os.environ.get("ISOTONE_THREADS", "").strip()
    if _thread_cap.isdigit() and int(_thread_cap) > 0:
        try:
            numba.set_num_threads(min(int(_thread_cap), numba.get_num_threads()))
        except ValueError:
            pass
    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False


def pair_term(f1: float, f2: float, a1: float, a2: float, model: int) -> float:
    """Dissonance contribution of one pure-tone pair (scalar reference path)."""
    if f1 <= f2:
        fmin = f1
        df = f2 - f1
    else:
        fmin = f2
        df = f1 - f2
    s = S_NUM / (S_C1 * fmin + S_C2)
    bracket = math.exp(-B1 * s * df) - math.exp(-B2 * s * df)
    if a1 <= a2:
        amin = a1
        amax = a2
    else:
        amin = a2
        amax = a1
    if model == 0:
        w = a1 * a2
    elif model == 1:
        tot = amin + amax
        if tot <= 0.0:
            return 0.0
        w = 0.5 * (amin * amax) ** 0.1 * (2.0 * amin / tot) ** 3.11
    else:
        w = amin ** 0.6
    return w * bracket


if HAVE_NUMBA:
    _pair_term_nb = njit(cache=True)(pair_term)

    @njit(cache=True)
    def _total_nb(freqs, amps, model):
        n = freqs.shape[0]
        acc = 0.0
        for i in range(n - 1):
            for j in range(i + 1, n):
                acc += _pair_term_nb(freqs[i], freqs[j], amps[i], amps[j], model)
        return acc

    @njit(cache=True)
    def _curve_nb(freqs, amps, alphas, model):
        m = freqs.shape[0]
        n = 2 * m
        merged_f = np.empty(n)
        merged_a = np.empty(n)
        for i in range(m):
            merged_f[i] = freqs[i]
            merged_a[i] = amps[i]
            merged_a[m + i] = amps[i]
        out = np.empty(alphas.shape[0])
        for k in range(alphas.shape[0]):
            for i in range(m):
                merged_f[m + i] = alphas[k] * freqs[i]
            out[k] = _total_nb(merged_f, merged_a, model)
        return out


def _pair_terms_np(fi, fj, ai, aj, model):
    fmin = np.minimum(fi, fj)
    df = np.abs(fi - fj)
    s = S_NUM / (S_C1 * fmin + S_C2)
    bracket = np.exp(-B1 * s * df) - np.exp(-B2 * s * df)
    if model == 0:
        w = ai * aj
    elif model == 1:
        amin = np.minimum(ai, aj)
        amax = np.maximum(ai, aj)
        tot = amin + amax
        safe = np.where(tot > 0.0, tot, 1.0)
        frac = np.where(tot > 0.0, 2.0 * amin / safe, 0.0)
        w = 0.5 * (amin * amax) ** 0.1 * frac ** 3.11
    else:
        w = np.minimum(ai, aj) ** 0.6
    return w * bracket


def _total_np(freqs, amps, model):
    n = freqs.shape[0]
    if n < 2:
        return 0.0
    iu, ju = np.triu_indices(n, k=1)
    terms = _pair_terms_np(freqs[iu], freqs[ju], amps[iu], amps[ju], model)
    return float(terms.sum())


def _curve_np(freqs, amps, alphas, model):
    m = freqs.shape[0]
    n = 2 * m
    F = np.empty((alphas.shape[0], n))
    F[:, :m] = freqs
    F[:, m:] = alphas[:, None] * freqs
    A = np.concatenate([amps, amps])
    iu, ju = np.triu_indices(n, k=1)
    terms = _pair_terms_np(F[:, iu], F[:, ju], A[iu], A[ju], model)
    return terms.sum(axis=1)


def using_numba() -> bool:
    """True when the numba backend is active."""
    return HAVE_NUMBA


def total_dissonance(freqs: np.ndarray, amps: np.ndarray, model: int) -> float:
    """Sum the pair dissonance over all unordered pairs of components."""
    freqs = np.ascontiguousarray(freqs, dtype=np.float64)
    amps = np.ascontiguousarray(amps, dtype=np.float64)
    if HAVE_NUMBA:
        return float(_total_nb(freqs, amps, model))
    return _total_np(freqs, amps, model)


def two_tone_totals(
    freqs: np.ndarray, amps: np.ndarray, alphas: np.ndarray, model: int
) -> np.ndarray:
    """Total dissonance of the merged 2m-component set for each alpha.

    The merged set holds the spectrum at its base frequencies plus a copy
    scaled by alpha; summing over all unordered pairs of the merged set
    yields the two intrinsic terms plus the full cross term in one pass.
    """
    freqs = np.ascontiguousarray(freqs, dtype=np.float64)
    amps = np.ascontiguousarray(amps, dtype=np.float64)
    alphas = np.ascontiguousarray(alphas, dtype=np.float64)
    if HAVE_NUMBA:
        return _curve_nb(freqs, amps, alphas, model)
    return _curve_np(freqs, amps, alphas, model)
