"""Random scene sampling: room statistics, path distances and reflection counts.

Every public sampler is a pure function of (config, seed). The random source
is Philox, a counter-based generator, so per-filter streams keyed by distinct
seeds are independent and reproducible under any parallel schedule.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import SimulationConfig

RNG_ALGORITHM = "philox4x64"
SEED_DERIVATION = "splitmix64((splitmix64(run_seed) + index) mod 2**64)"

_MASK64 = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def derive_seed(run_seed: int, index: int) -> int:
    """Per-filter seed for batch generation.

    splitmix64 is a bijection, so distinct indices under one run seed can
    never collide; the rule is recorded in every manifest.
    """
    return _splitmix64((_splitmix64(run_seed & _MASK64) + index) & _MASK64)


def rng_from_seed(seed: int) -> np.random.Generator:
    seed = int(seed)
    if not 0 <= seed <= _MASK64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return np.random.Generator(np.random.Philox(key=seed))


@dataclass(frozen=True)
class SceneDraw:
    """One realized scene: room statistics plus per-image distances and counts.

    ``seed`` is None for draws derived from explicit geometry rather than a
    random stream.
    """

    t60: float
    room_stat: float
    reflection_coeff: float
    direct_dist: float
    image_dists: np.ndarray
    reflection_counts: np.ndarray
    seed: int | None


def reflection_coefficient(room_stat: float, t60: float) -> float:
    """Per-bounce amplitude retention from the Eyring relation.

    sqrt(1 - (1 - exp(-0.16 R / T60))^2), strictly inside (0, 1) for
    positive inputs.
    """
    if room_stat <= 0 or t60 <= 0:
        raise ValueError(f"room_stat and t60 must be positive, got ({room_stat}, {t60})")
    inner = 1.0 - math.exp(-0.16 * room_stat / t60)
    return math.sqrt(1.0 - inner * inner)


def sample_room(rng: np.random.Generator, config: SimulationConfig):
    """Draw (t60, room_stat, reflection_coeff) for one scene."""
    t60 = rng.uniform(*config.t60_range)
    room_stat = rng.uniform(*config.room_stat_range)
    return t60, room_stat, reflection_coefficient(room_stat, t60)


def sample_direct_distance(rng: np.random.Generator, config: SimulationConfig,
                           t60: float) -> float:
    """Draw the direct-path distance, rejecting draws beyond the T60 horizon.

    The horizon c0 * t60 is the farthest any path may travel; with the
    default ranges (12 m < 34 m) rejection never triggers.
    """
    lo, hi = config.direct_range
    horizon = config.sound_velocity * t60
    if lo >= horizon:
        raise ValueError(
            f"direct_range lower bound {lo} m cannot satisfy d0 < c0*t60 = {horizon} m")
    while True:
        d0 = rng.uniform(lo, hi)
        if d0 < horizon:
            return d0


def quadratic_inverse_cdf(u, alpha: float, beta: float):
    """Map uniform(0,1) draws through the inverse CDF of p(x) ∝ x^2 on [alpha, beta]."""
    a3 = alpha ** 3
    span = beta ** 3 - a3
    return np.power(u * span + a3, 1.0 / 3.0)


def sample_distance_ratios(rng: np.random.Generator, count: int,
                           alpha: float, beta: float) -> np.ndarray:
    """Draw raw distance ratios with density 3x^2/(beta^3 - alpha^3) on [alpha, beta]."""
    if not 0.0 <= alpha <= beta <= 1.0:
        raise ValueError(f"need 0 <= alpha <= beta <= 1, got ({alpha}, {beta})")
    u = rng.random(count)
    if alpha == beta:
        return np.full(count, float(alpha))
    return quadratic_inverse_cdf(u, alpha, beta)


def rescale_ratios(ratios: np.ndarray, alpha: float, beta: float,
                   sound_velocity: float, t60: float, direct_dist: float) -> np.ndarray:
    """Affinely map raw ratios from [alpha, beta] onto [1, c0*t60/d0].

    Written as (x - alpha)/(beta - alpha) so alpha = 0 stays well-defined;
    algebraically identical to scaling x/alpha - 1 by alpha/(beta - alpha).
    """
    target = sound_velocity * t60 / direct_dist
    if target <= 1.0:
        raise ValueError(
            f"direct distance {direct_dist} m exceeds travel horizon "
            f"c0*t60 = {sound_velocity * t60} m")
    if alpha == beta:
        return np.ones_like(np.asarray(ratios, dtype=float))
    return 1.0 + (ratios - alpha) / (beta - alpha) * (target - 1.0)


def max_reflections(sound_velocity: float, t60: float, direct_dist: float,
                    reflection_coeff: float) -> float:
    """Number of bounces after which a path has decayed by 60 dB, clamped to >= 1.

    (log10(c0*t60) - log10(d0) - 3) / log10(r). The raw value turns zero or
    negative once c0*t60/d0 >= 1000 (reachable with the default ranges), so
    it is clamped to keep the reflection-count clamp well-ordered.
    """
    if sound_velocity <= 0 or t60 <= 0 or direct_dist <= 0:
        raise ValueError("inputs must be positive")
    if not 0.0 < reflection_coeff < 1.0:
        raise ValueError(
            f"reflection coefficient must lie in (0, 1), got {reflection_coeff}")
    raw = (math.log10(sound_velocity * t60) - math.log10(direct_dist) - 3.0) \
        / math.log10(reflection_coeff)
    return max(raw, 1.0)


def perturbed_reflection_counts(image_dists: np.ndarray, travel_horizon: float,
                                rr_max: float, perturb: np.ndarray,
                                shrink_tau: float) -> np.ndarray:
    """Reflection counts as a perturbed quadratic function of distance.

    1 + (d/c0T60)^2 (RRmax - 1) + p d^tau, clamped into [1, RRmax].
    """
    ratio = image_dists / travel_horizon
    counts = 1.0 + ratio * ratio * (rr_max - 1.0) \
        + perturb * np.power(image_dists, shrink_tau)
    return np.maximum(np.minimum(counts, rr_max), 1.0)


def sample_reflection_counts(rng: np.random.Generator, image_dists: np.ndarray,
                             sound_velocity: float, t60: float, rr_max: float,
                             perturb_range, shrink_tau: float) -> np.ndarray:
    perturb = rng.uniform(perturb_range[0], perturb_range[1], len(image_dists))
    return perturbed_reflection_counts(
        image_dists, sound_velocity * t60, rr_max, perturb, shrink_tau)


def sample_scene(config: SimulationConfig, seed: int) -> SceneDraw:
    """Draw a complete scene; a pure, bit-reproducible function of (config, seed)."""
    rng = rng_from_seed(seed)
    t60, room_stat, refl = sample_room(rng, config)
    d0 = sample_direct_distance(rng, config, t60)
    ratios = sample_distance_ratios(rng, config.num_images, config.alpha, config.beta)
    scaled = rescale_ratios(ratios, config.alpha, config.beta,
                            config.sound_velocity, t60, d0)
    dists = scaled * d0
    horizon = config.sound_velocity * t60
    # guard the [d0, c0*t60] invariant against last-ulp rounding of the map
    dists = np.minimum(np.maximum(dists, d0), horizon)
    rr_max = max_reflections(config.sound_velocity, t60, d0, refl)
    counts = sample_reflection_counts(rng, dists, config.sound_velocity, t60,
                                      rr_max, config.perturb_range, config.shrink_tau)
    return SceneDraw(
        t60=t60,
        room_stat=room_stat,
        reflection_coeff=refl,
        direct_dist=d0,
        image_dists=dists,
        reflection_counts=counts,
        seed=int(seed),
    )
