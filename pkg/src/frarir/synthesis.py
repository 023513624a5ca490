"""Filter synthesis: dirac comb, early-reverberation window and rate pipeline.

The synthesis chain is shared by both front-ends (stochastic scenes and
explicit shoebox geometry): build a high-rate comb, optionally window the
early part, then decimate -> 80 Hz high-pass -> decimate down to the target
rate. All steps are pure functions.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import butter, lfilter, upfirdn

from .config import SimulationConfig
from .sampling import SceneDraw, sample_scene

# Combs beyond this many high-rate samples are refused rather than allocated.
MAX_COMB_SAMPLES = 1 << 31

# Anti-alias FIR design: Kaiser windowed sinc with 60 dB stopband attenuation
# and a transition band of 20% of the post-decimation Nyquist.
STOPBAND_DB = 60.0
TRANSITION = 0.2


@dataclass(frozen=True)
class RirFilter:
    """A sampled impulse response plus the index of its direct-path tap."""

    sample_rate: int
    samples: np.ndarray
    direct_index: int

    def __len__(self):
        return len(self.samples)


@dataclass(frozen=True)
class RirPair:
    """Full and early-reverberation filters realized from one scene."""

    full: RirFilter
    early: RirFilter
    scene: SceneDraw


def comb_taps(scene: SceneDraw, config: SimulationConfig):
    """Tap positions and amplitudes at the high rate, direct path first.

    Returns (length, indices, amplitudes). The direct tap has amplitude
    1/d0 (zero reflections); image i contributes r^g_i / d_i at the sample
    index nearest above d_i/c0, clamped to the comb length.
    """
    high_rate = config.high_rate
    length = math.ceil(scene.t60 * high_rate)
    if length > MAX_COMB_SAMPLES:
        raise ValueError(f"comb of {length} samples exceeds the supported maximum")
    c0 = config.sound_velocity
    q_direct = min(math.ceil(scene.direct_dist / c0 * high_rate), length - 1)
    q_images = np.minimum(np.ceil(scene.image_dists / c0 * high_rate),
                          length - 1).astype(np.int64)
    amp_images = np.power(scene.reflection_coeff, scene.reflection_counts) \
        / scene.image_dists
    indices = np.concatenate([np.array([q_direct], dtype=np.int64), q_images])
    amplitudes = np.concatenate([np.array([1.0 / scene.direct_dist]), amp_images])
    return length, indices, amplitudes


def build_comb(scene: SceneDraw, config: SimulationConfig) -> RirFilter:
    """Accumulate all taps into a high-rate dirac comb; collisions add."""
    length, indices, amplitudes = comb_taps(scene, config)
    samples = np.zeros(length)
    np.add.at(samples, indices, amplitudes)
    return RirFilter(sample_rate=config.high_rate, samples=samples,
                     direct_index=int(indices[0]))


def early_window_bounds(direct_dist: float, config: SimulationConfig):
    """Inclusive high-rate sample range kept as the early component."""
    high_rate = config.high_rate
    center = math.ceil(direct_dist / config.sound_velocity * high_rate)
    lo_ms, hi_ms = config.early_window_ms
    lo = center + math.floor(lo_ms * high_rate / 1000)
    hi = center + math.ceil(hi_ms * high_rate / 1000)
    return lo, hi


def early_window(comb: RirFilter, direct_dist: float,
                 config: SimulationConfig) -> RirFilter:
    """Zero the comb outside the early window around the direct-path tap."""
    lo, hi = early_window_bounds(direct_dist, config)
    samples = np.zeros(len(comb.samples))
    lo_clamped = max(lo, 0)
    hi_clamped = min(hi, len(comb.samples) - 1)
    if lo_clamped <= hi_clamped:
        samples[lo_clamped:hi_clamped + 1] = comb.samples[lo_clamped:hi_clamped + 1]
    return RirFilter(sample_rate=comb.sample_rate, samples=samples,
                     direct_index=comb.direct_index)


@functools.lru_cache(maxsize=8)
def decimation_taps(factor: int) -> np.ndarray:
    """Kaiser windowed-sinc low-pass for decimation by ``factor``.

    Cutoff centered in the transition band below the new Nyquist; DC gain
    normalized to exactly 1 so passband amplitudes survive decimation.
    """
    if factor < 1:
        raise ValueError("decimation factor must be >= 1")
    beta = 0.1102 * (STOPBAND_DB - 8.7)
    delta_w = TRANSITION * math.pi / factor
    order = math.ceil((STOPBAND_DB - 7.95) / (2.285 * delta_w))
    if order % 2:
        order += 1
    half = order // 2
    cutoff = (1.0 - TRANSITION / 2.0) * math.pi / factor
    n = np.arange(-half, half + 1)
    taps = (cutoff / math.pi) * np.sinc(cutoff * n / math.pi)
    taps *= np.kaiser(order + 1, beta)
    taps /= taps.sum()
    taps.setflags(write=False)
    return taps


def decimation_half_length(factor: int) -> int:
    return len(decimation_taps(factor)) // 2


def decimate(x: np.ndarray, factor: int) -> np.ndarray:
    """Anti-aliased decimation with the group delay of the FIR compensated.

    Output sample k equals the low-passed input at sample k*factor, so tap
    positions map to final indices by plain division. Sparse inputs (dirac
    combs) take a scatter path over the nonzero taps; dense inputs go
    through a polyphase FIR. Both paths evaluate the same convolution.
    """
    if factor == 1:
        return np.asarray(x, dtype=float).copy()
    taps = decimation_taps(factor)
    half = len(taps) // 2
    n_out = -(-len(x) // factor)
    if np.count_nonzero(x) * 5 < len(x):
        return _decimate_sparse(x, np.flatnonzero(x), taps, half, factor, n_out)
    return _decimate_dense(np.asarray(x, dtype=float), taps, half, factor, n_out)


def _decimate_dense(x, taps, half, factor, n_out):
    # upfirdn emits conv(x, taps)[k*factor]; pre-padding by `pad` zeros turns
    # that into conv[k*factor - pad], so slicing at (half+pad)/factor yields
    # the delay-compensated sequence conv[k*factor + half].
    pad = (-half) % factor
    padded = np.concatenate([np.zeros(pad), x]) if pad else x
    full = upfirdn(taps, padded, 1, factor)
    offset = (half + pad) // factor
    out = full[offset:offset + n_out]
    if len(out) < n_out:
        out = np.concatenate([out, np.zeros(n_out - len(out))])
    return out


def _decimate_sparse(x, nonzero, taps, half, factor, n_out):
    if len(nonzero) == 0:
        return np.zeros(n_out)
    values = x[nonzero]
    # output k sees tap q whenever |k*factor - q| <= half
    k_first = -((half - nonzero) // factor)  # ceil((q - half) / factor)
    span = (2 * half) // factor + 2
    k_grid = k_first[:, None] + np.arange(span)[None, :]
    coeff_idx = k_grid * factor + half - nonzero[:, None]
    valid = (coeff_idx >= 0) & (coeff_idx < len(taps)) \
        & (k_grid >= 0) & (k_grid < n_out)
    weights = values[:, None] * taps[np.clip(coeff_idx, 0, len(taps) - 1)]
    return np.bincount(k_grid[valid], weights=weights[valid], minlength=n_out)


@functools.lru_cache(maxsize=8)
def _highpass_coefficients(rate: int):
    return butter(2, 80.0, btype="highpass", fs=rate)


def highpass_80(signal: np.ndarray, rate: int) -> np.ndarray:
    """Second-order Butterworth high-pass at 80 Hz, one forward pass."""
    if rate <= 160:
        raise ValueError("sample rate must exceed 160 Hz")
    b, a = _highpass_coefficients(rate)
    return lfilter(b, a, signal)


def resampler_margin(config: SimulationConfig) -> int:
    """Worst-case FIR tail spread of the rate pipeline, in final-rate samples.

    Each decimation stage smears support by its FIR half-length at its own
    input rate; one extra sample absorbs index rounding. The early filter is
    guaranteed silent beyond direct_index + early window + this margin.
    """
    stage1 = config.high_rate_factor // config.mid_rate_factor
    h1 = decimation_half_length(stage1) if stage1 > 1 else 0
    h2 = decimation_half_length(config.mid_rate_factor) if config.mid_rate_factor > 1 else 0
    return math.ceil(h1 / config.high_rate_factor) \
        + math.ceil(h2 / config.mid_rate_factor) + 1


def resample_pipeline(comb: RirFilter, config: SimulationConfig, *,
                      final_length: int | None = None,
                      direct_index: int | None = None) -> RirFilter:
    """Bring a high-rate comb down to the target rate.

    Decimate to the intermediate rate, apply the 80 Hz high-pass there,
    decimate to the target rate, then trim or zero-pad. Group delay is
    compensated inside ``decimate``, so the direct tap lands at
    round(d0/c0 * sample_rate) up to the comb's own ceil rounding.
    """
    stage1 = config.high_rate_factor // config.mid_rate_factor
    mid = decimate(comb.samples, stage1)
    mid = highpass_80(mid, config.mid_rate)
    out = decimate(mid, config.mid_rate_factor)
    if final_length is None:
        final_length = -(-len(comb.samples) // config.high_rate_factor)
    if len(out) >= final_length:
        out = out[:final_length]
    else:
        out = np.concatenate([out, np.zeros(final_length - len(out))])
    if direct_index is None:
        direct_index = round(comb.direct_index / config.high_rate_factor)
    direct_index = min(max(direct_index, 0), final_length - 1)
    return RirFilter(sample_rate=config.sample_rate, samples=out,
                     direct_index=direct_index)


def early_tail_bound(direct_index: int, config: SimulationConfig) -> int:
    """Last final-rate sample index that may carry early-filter energy."""
    hi_ms = config.early_window_ms[1]
    return direct_index + math.ceil(hi_ms * config.sample_rate / 1000) \
        + resampler_margin(config)


def finalize_pair(comb: RirFilter, scene: SceneDraw,
                  config: SimulationConfig) -> RirPair:
    """Window the early part and run both filters through the rate pipeline.

    Shared by both front-ends. The early filter is re-masked after the
    pipeline: the high-pass IIR smears a vanishing tail past any finite
    margin, and the early contract demands exact silence beyond
    ``early_tail_bound``.
    """
    early_comb = early_window(comb, scene.direct_dist, config)

    final_length = math.ceil(scene.t60 * config.sample_rate)
    direct_index = round(scene.direct_dist / config.sound_velocity * config.sample_rate)
    direct_index = min(direct_index, final_length - 1)

    full = resample_pipeline(comb, config, final_length=final_length,
                             direct_index=direct_index)
    early = resample_pipeline(early_comb, config, final_length=final_length,
                              direct_index=direct_index)
    bound = early_tail_bound(direct_index, config)
    if bound + 1 < final_length:
        early.samples[bound + 1:] = 0.0
    return RirPair(full=full, early=early, scene=scene)


def generate(config: SimulationConfig, seed: int) -> RirPair:
    """Sample a scene and synthesize its full and early filters.

    Deterministic in (config, seed).
    """
    scene = sample_scene(config, seed)
    return finalize_pair(build_comb(scene, config), scene, config)
