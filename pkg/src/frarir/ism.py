"""Classic shoebox image-source reference: explicit virtual-image coordinates.

This is the correctness anchor and speed baseline for the stochastic
generator. It enumerates every mirrored source, computes its true distance
and reflection count, and feeds the same synthesis back-end, so any back-end
bug affects both generators identically.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import SimulationConfig
from .sampling import SceneDraw, reflection_coefficient
from .synthesis import MAX_COMB_SAMPLES, RirFilter, RirPair, finalize_pair

WALL_MARGIN = 0.1          # metres, source/mic clearance from every wall
MIN_SEPARATION = 0.01      # metres, source-to-mic lower bound (finite 1/d0)
MAX_ORDER_CAP = 20

DEFAULT_DIM_RANGES = ((3.0, 12.0), (3.0, 12.0), (3.0, 4.0))


@dataclass(frozen=True)
class ShoeboxRoom:
    """Rectangular room with one source, one mic and a target decay time."""

    length: float
    width: float
    height: float
    source_pos: tuple[float, float, float]
    mic_pos: tuple[float, float, float]
    t60: float
    max_order: int

    def __post_init__(self):
        dims = (self.length, self.width, self.height)
        if min(dims) <= 2 * WALL_MARGIN:
            raise ValueError(f"room dimensions too small: {dims}")
        for name, pos in (("source", self.source_pos), ("mic", self.mic_pos)):
            for coord, dim in zip(pos, dims):
                if not WALL_MARGIN <= coord <= dim - WALL_MARGIN:
                    raise ValueError(
                        f"{name} position {pos} violates the {WALL_MARGIN} m wall margin")
        if math.dist(self.source_pos, self.mic_pos) < MIN_SEPARATION:
            raise ValueError("source and mic positions coincide")
        if self.t60 <= 0:
            raise ValueError("t60 must be positive")
        if self.max_order < 0:
            raise ValueError("max_order must be >= 0")

    @property
    def dims(self) -> tuple[float, float, float]:
        return (self.length, self.width, self.height)


def room_stat(room: ShoeboxRoom) -> float:
    """Volume over total surface area of the empty room."""
    l, w, h = room.dims
    return (l * w * h) / (2.0 * (l * w + l * h + w * h))


def _axis_images(coord: float, size: float, max_order: int):
    """1-D mirror images of ``coord`` across walls at 0 and ``size``.

    Image k sits at k*size + coord for even k and (k+1)*size - coord for
    odd k, after |k| reflections.
    """
    images = []
    for k in range(-max_order, max_order + 1):
        if k % 2 == 0:
            pos = k * size + coord
        else:
            pos = (k + 1) * size - coord
        images.append((pos, abs(k)))
    return images


def image_expansion(room: ShoeboxRoom):
    """All (position, reflection_count) pairs of the mirror lattice.

    (2*max_order + 1)^3 images; order 0 is the source itself with zero
    reflections. No distance culling happens here.
    """
    xs = _axis_images(room.source_pos[0], room.length, room.max_order)
    ys = _axis_images(room.source_pos[1], room.width, room.max_order)
    zs = _axis_images(room.source_pos[2], room.height, room.max_order)
    images = []
    for px, gx in xs:
        for py, gy in ys:
            for pz, gz in zs:
                images.append(((px, py, pz), gx + gy + gz))
    return images


def default_max_order(dims, t60: float, sound_velocity: float = 340.0,
                      cap: int = MAX_ORDER_CAP) -> int:
    """Smallest per-axis order that covers every image within c0*t60, capped.

    Axis images of a length-L axis sit within |k|*L +- L of the mic, so
    order ceil(horizon/L) + 2 guarantees no image inside the travel horizon
    is missed along that axis; the cap bounds the lattice size.
    """
    horizon = sound_velocity * t60
    return min(cap, max(math.ceil(horizon / d) + 2 for d in dims))


def sample_shoebox(rng: np.random.Generator, config: SimulationConfig,
                   dim_ranges=DEFAULT_DIM_RANGES) -> ShoeboxRoom:
    """Random room in the default 3x3x3 .. 12x12x4 m^3 box with random endpoints."""
    dims = tuple(rng.uniform(lo, hi) for lo, hi in dim_ranges)
    t60 = rng.uniform(*config.t60_range)

    def _point():
        return tuple(rng.uniform(WALL_MARGIN, d - WALL_MARGIN) for d in dims)

    source = _point()
    mic = _point()
    while math.dist(source, mic) < 10 * MIN_SEPARATION:
        mic = _point()
    order = default_max_order(dims, t60, config.sound_velocity)
    return ShoeboxRoom(length=dims[0], width=dims[1], height=dims[2],
                       source_pos=source, mic_pos=mic, t60=t60, max_order=order)


def ism_filter(room: ShoeboxRoom, config: SimulationConfig) -> RirPair:
    """Image-source RIR through the shared synthesis back-end.

    Walks every image explicitly: distance to the mic, per-image amplitude
    r^g / d, tap index at the high rate. Images beyond the travel horizon
    c0 * t60 are culled.
    """
    r = reflection_coefficient(room_stat(room), room.t60)
    c0 = config.sound_velocity
    high_rate = config.high_rate
    length = math.ceil(room.t60 * high_rate)
    if length > MAX_COMB_SAMPLES:
        raise ValueError(f"comb of {length} samples exceeds the supported maximum")
    horizon = c0 * room.t60
    mx, my, mz = room.mic_pos

    samples = np.zeros(length)
    kept_dists = []
    kept_counts = []
    for (px, py, pz), g in image_expansion(room):
        dx = px - mx
        dy = py - my
        dz = pz - mz
        d = math.sqrt(dx * dx + dy * dy + dz * dz)
        if d > horizon:
            continue
        q = min(math.ceil(d / c0 * high_rate), length - 1)
        samples[q] += r ** g / d
        if g > 0:
            kept_dists.append(d)
            kept_counts.append(float(g))

    d0 = math.dist(room.source_pos, room.mic_pos)
    q0 = min(math.ceil(d0 / c0 * high_rate), length - 1)
    comb = RirFilter(sample_rate=high_rate, samples=samples, direct_index=q0)

    # carries the realized geometry; counts here are exact integers, not the
    # sampled-scene kind, so the g <= RRmax bound of sampled draws is not implied
    scene = SceneDraw(
        t60=room.t60,
        room_stat=room_stat(room),
        reflection_coeff=r,
        direct_dist=d0,
        image_dists=np.array(kept_dists),
        reflection_counts=np.array(kept_counts),
        seed=None,
    )
    return finalize_pair(comb, scene, config)
