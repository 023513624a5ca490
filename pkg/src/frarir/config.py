"""Tunable parameters shared by the stochastic and geometric RIR generators."""
from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path

Interval = tuple[float, float]


@dataclass(frozen=True)
class SimulationConfig:
    """Sampling ranges and rate factors for RIR synthesis.

    Filters are synthesized as dirac combs at ``high_rate_factor * sample_rate``,
    high-pass filtered at ``mid_rate_factor * sample_rate`` and emitted at
    ``sample_rate``.
    """

    sample_rate: int = 16000
    high_rate_factor: int = 64
    mid_rate_factor: int = 8
    t60_range: Interval = (0.1, 0.8)        # seconds
    room_stat_range: Interval = (0.1, 1.2)  # metres, volume / surface area
    direct_range: Interval = (0.2, 12.0)    # metres
    alpha: float = 0.2
    beta: float = 1.0
    perturb_range: Interval = (-2.0, 2.0)
    shrink_tau: float = 0.2
    sound_velocity: float = 340.0           # metres / second
    num_images: int = 512
    early_window_ms: Interval = (-6.0, 50.0)

    def __post_init__(self):
        def _interval(name):
            lo, hi = getattr(self, name)
            if not lo <= hi:
                raise ValueError(f"{name} must satisfy lower <= upper, got {(lo, hi)}")

        for name in ("t60_range", "room_stat_range", "direct_range",
                     "perturb_range", "early_window_ms"):
            _interval(name)
        if not 0.0 <= self.alpha <= self.beta <= 1.0:
            raise ValueError(f"need 0 <= alpha <= beta <= 1, got ({self.alpha}, {self.beta})")
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        if self.high_rate_factor < 1 or self.mid_rate_factor < 1:
            raise ValueError("rate factors must be >= 1")
        if self.high_rate_factor % self.mid_rate_factor:
            raise ValueError("high_rate_factor must be divisible by mid_rate_factor")
        if self.num_images < 1:
            raise ValueError("num_images must be >= 1")
        if self.sound_velocity <= 0:
            raise ValueError("sound_velocity must be positive")
        if self.shrink_tau <= 0:
            raise ValueError("shrink_tau must be positive")
        if self.t60_range[0] <= 0:
            raise ValueError("t60_range must be positive")
        if self.direct_range[0] <= 0:
            raise ValueError("direct_range must be positive")
        if self.room_stat_range[0] <= 0:
            raise ValueError("room_stat_range must be positive")
        # the 80 Hz high-pass runs at the intermediate rate and needs headroom
        if self.mid_rate_factor * self.sample_rate <= 160:
            raise ValueError("mid rate must exceed 160 Hz for the 80 Hz high-pass")

    @property
    def high_rate(self) -> int:
        return self.high_rate_factor * self.sample_rate

    @property
    def mid_rate(self) -> int:
        return self.mid_rate_factor * self.sample_rate

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        for key, value in out.items():
            if isinstance(value, tuple):
                out[key] = list(value)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "SimulationConfig":
        """Build a config from a flat dict; unknown keys are rejected."""
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        kwargs = {}
        for key, value in data.items():
            if isinstance(value, list):
                value = tuple(float(v) for v in value)
            kwargs[key] = value
        return cls(**kwargs)

    @classmethod
    def from_json(cls, path: str | Path) -> "SimulationConfig":
        with open(path) as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise ValueError("config file must contain a JSON object")
        return cls.from_dict(data)
