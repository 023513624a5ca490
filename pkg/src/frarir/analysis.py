"""Acoustic validation: energy decay, T60 estimation, DRR and spectrograms."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .synthesis import RirFilter

T60_FIT_RANGE_DB = (-5.0, -25.0)
DRR_DIRECT_WINDOW_MS = 2.5
EDC_EXPORT_FLOOR_DB = -300.0


class InsufficientDecayError(ValueError):
    """The decay curve never reaches the lower end of the fit range."""


@dataclass(frozen=True)
class DecayAnalysis:
    edc_db: np.ndarray
    estimated_t60: float
    drr_db: float
    fit_range_db: tuple[float, float] = field(default=T60_FIT_RANGE_DB)


def schroeder_edc(filt: RirFilter) -> np.ndarray:
    """Backward-integrated energy decay curve in dB, starting at exactly 0."""
    energy = np.asarray(filt.samples, dtype=float) ** 2
    tail = np.cumsum(energy[::-1])[::-1]
    if tail[0] <= 0.0:
        raise ValueError("cannot integrate an all-zero filter")
    with np.errstate(divide="ignore"):
        return 10.0 * np.log10(tail / tail[0])


def estimate_t60(edc_db: np.ndarray, rate: int,
                 fit_range_db: tuple[float, float] = T60_FIT_RANGE_DB) -> float:
    """T60 from a least-squares line over the fit segment of the decay curve.

    With the default (-5, -25) range this is the T20 estimate: three times
    the time the fitted line takes to fall 20 dB. Filters truncated at T60
    rarely reach -35 dB cleanly, which is why the fit stops at -25.
    """
    top_db, bottom_db = fit_range_db
    below_top = np.flatnonzero(edc_db <= top_db)
    below_bottom = np.flatnonzero(edc_db <= bottom_db)
    if len(below_top) == 0 or len(below_bottom) == 0:
        raise InsufficientDecayError(
            f"decay curve never reaches {bottom_db} dB")
    start, end = below_top[0], below_bottom[0]
    segment = edc_db[start:end + 1]
    if len(segment) < 2 or not np.all(np.isfinite(segment)):
        raise InsufficientDecayError("decay segment too short to fit")
    times = np.arange(start, end + 1) / rate
    slope, _ = np.polyfit(times, segment, 1)
    if slope >= 0:
        raise InsufficientDecayError("decay curve is not falling")
    return 60.0 / -slope


def direct_to_reverberant(filt: RirFilter,
                          window_ms: float = DRR_DIRECT_WINDOW_MS) -> float:
    """Energy ratio (dB) of +-window_ms around the direct tap vs the rest.

    Returns +inf when there is no reverberant energy at all.
    """
    energy = np.asarray(filt.samples, dtype=float) ** 2
    total = energy.sum()
    if total <= 0.0:
        raise ValueError("cannot analyze an all-zero filter")
    w = round(window_ms / 1000.0 * filt.sample_rate)
    lo = max(filt.direct_index - w, 0)
    hi = min(filt.direct_index + w, len(energy) - 1)
    direct = energy[lo:hi + 1].sum()
    reverberant = total - direct
    if reverberant <= 0.0:
        return math.inf
    return 10.0 * math.log10(direct / reverberant)


def analyze_decay(filt: RirFilter) -> DecayAnalysis:
    edc = schroeder_edc(filt)
    return DecayAnalysis(
        edc_db=edc,
        estimated_t60=estimate_t60(edc, filt.sample_rate),
        drr_db=direct_to_reverberant(filt),
    )


def spectrogram(samples: np.ndarray, window: int = 256, hop: int = 64) -> np.ndarray:
    """Magnitude STFT with a Hann window; rows are frames, columns bins."""
    samples = np.asarray(samples, dtype=float)
    if len(samples) < window:
        raise ValueError(f"need at least {window} samples, got {len(samples)}")
    n_frames = 1 + (len(samples) - window) // hop
    win = np.hanning(window)
    offsets = np.arange(n_frames) * hop
    frames = samples[offsets[:, None] + np.arange(window)[None, :]] * win
    return np.abs(np.fft.rfft(frames, axis=1))


def export_edc_csv(path, edc_db: np.ndarray) -> None:
    """One decay value per row; -inf floored so rows stay plain decimals."""
    floored = np.maximum(edc_db, EDC_EXPORT_FLOOR_DB)
    np.savetxt(path, floored, fmt="%.10g")


def export_spectrogram_csv(path, magnitudes: np.ndarray) -> None:
    """One frame per row, comma-separated bin magnitudes."""
    np.savetxt(path, magnitudes, fmt="%.10g", delimiter=",")
