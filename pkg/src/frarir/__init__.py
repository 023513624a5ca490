"""frarir: fast stochastic room-impulse-response simulation.

Two front-ends share one synthesis back-end: ``generate`` samples sound
paths stochastically, ``ism_filter`` enumerates explicit shoebox images.
"""

__version__ = "0.1.0"

from .analysis import (DecayAnalysis, InsufficientDecayError, analyze_decay,
                       direct_to_reverberant, estimate_t60, schroeder_edc,
                       spectrogram)
from .config import SimulationConfig
from .ism import ShoeboxRoom, default_max_order, image_expansion, ism_filter, \
    room_stat, sample_shoebox
from .sampling import (SceneDraw, derive_seed, max_reflections,
                       reflection_coefficient, rescale_ratios, rng_from_seed,
                       sample_direct_distance, sample_distance_ratios,
                       sample_reflection_counts, sample_room, sample_scene)
from .synthesis import (RirFilter, RirPair, build_comb, comb_taps, decimate,
                        early_tail_bound, early_window, finalize_pair, generate,
                        highpass_80, resample_pipeline, resampler_margin)

__all__ = [
    "DecayAnalysis", "InsufficientDecayError", "RirFilter", "RirPair",
    "SceneDraw", "ShoeboxRoom", "SimulationConfig", "analyze_decay",
    "build_comb", "comb_taps", "decimate", "default_max_order", "derive_seed",
    "direct_to_reverberant", "early_tail_bound", "early_window", "estimate_t60", "finalize_pair",
    "generate", "highpass_80", "image_expansion", "ism_filter",
    "max_reflections", "reflection_coefficient", "resample_pipeline",
    "resampler_margin", "rescale_ratios", "rng_from_seed",
    "sample_direct_distance", "sample_distance_ratios",
    "sample_reflection_counts", "sample_room", "sample_scene",
    "sample_shoebox", "schroeder_edc", "spectrogram",
]
