"""Independent reference implementations used to check the package.

Everything here is deliberately scalar / brute-force: per-tap walks with
np.float64 scalar arithmetic, direct summation, explicit mirror sets. These
stay separate from the vectorized code paths they verify.
"""
import math

import numpy as np


def ks_distance(samples, cdf) -> float:
    """Kolmogorov-Smirnov distance between an empirical sample and a CDF."""
    x = np.sort(np.asarray(samples))
    n = len(x)
    f = cdf(x)
    upper = np.max(np.arange(1, n + 1) / n - f)
    lower = np.max(f - np.arange(0, n) / n)
    return max(upper, lower)


def quadratic_cdf(x, alpha, beta):
    return (np.asarray(x) ** 3 - alpha ** 3) / (beta ** 3 - alpha ** 3)


def scalar_comb_oracle(config, seed):
    """Per-tap scalar reimplementation of the sampled comb.

    Consumes the same Philox stream as sample_scene, then walks every image
    one at a time with scalar arithmetic: Eyring coefficient, inverse-CDF
    ratio, affine rescale, max-reflection count, perturbed count, tap index
    and amplitude. Returns (length, {index: amplitude}).
    """
    rng = np.random.Generator(np.random.Philox(key=seed))
    t60 = rng.uniform(*config.t60_range)
    room_stat = rng.uniform(*config.room_stat_range)
    lo, hi = config.direct_range
    horizon = config.sound_velocity * t60
    if lo >= horizon:
        raise ValueError("impossible direct range")
    while True:
        d0 = rng.uniform(lo, hi)
        if d0 < horizon:
            break
    u = rng.random(config.num_images)
    perturb = rng.uniform(config.perturb_range[0], config.perturb_range[1],
                          config.num_images)

    c0 = config.sound_velocity
    inner = 1.0 - math.exp(-0.16 * room_stat / t60)
    r = math.sqrt(1.0 - inner * inner)
    a3 = config.alpha ** 3
    span = config.beta ** 3 - a3
    target = c0 * t60 / d0
    rr_max = max((math.log10(c0 * t60) - math.log10(d0) - 3.0) / math.log10(r), 1.0)

    high_rate = config.high_rate
    length = math.ceil(t60 * high_rate)
    taps = {}

    def add(index, amp):
        taps[index] = taps.get(index, 0.0) + amp

    add(min(math.ceil(d0 / c0 * high_rate), length - 1), 1.0 / d0)
    ct = c0 * t60
    for i in range(config.num_images):
        ratio_hat = np.power(u[i] * span + a3, 1.0 / 3.0)
        ratio = 1.0 + (ratio_hat - config.alpha) / (config.beta - config.alpha) \
            * (target - 1.0)
        d = min(max(ratio * d0, d0), ct)
        rel = d / ct
        g = 1.0 + rel * rel * (rr_max - 1.0) + perturb[i] * np.power(d, config.shrink_tau)
        g = max(min(g, rr_max), 1.0)
        q = min(math.ceil(d / c0 * high_rate), length - 1)
        add(q, float(np.power(np.float64(r), np.float64(g)) / d))
    return length, taps


def brute_force_mirror_images(source, dims, max_order):
    """Mirror set per axis built by explicit reflections, then combined.

    Along each axis the images of x are {2mL + x} and {2mL - x}; keeping
    |k| <= max_order of the interleaved sequence reproduces the lattice.
    """
    def axis_set(x, size):
        out = {}
        for m in range(-max_order - 1, max_order + 2):
            for pos, base in ((2 * m * size + x, 2 * abs(m)), (2 * m * size - x, None)):
                if base is not None:
                    k = 2 * m
                else:
                    # 2mL - x is reached after |2m - 1| reflections
                    k = 2 * m - 1
                if abs(k) <= max_order:
                    out[round(pos, 12)] = abs(k)
        return out

    axes = [axis_set(source[i], dims[i]) for i in range(3)]
    images = []
    for px, gx in axes[0].items():
        for py, gy in axes[1].items():
            for pz, gz in axes[2].items():
                images.append(((px, py, pz), gx + gy + gz))
    return images
