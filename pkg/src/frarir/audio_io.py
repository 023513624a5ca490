"""Mono WAV helpers. Filters are stored as 32-bit float RIFF files."""
from __future__ import annotations

import numpy as np
from scipy.io import wavfile


def write_wav(path, rate: int, samples: np.ndarray) -> None:
    wavfile.write(path, rate, np.asarray(samples, dtype=np.float32))


def read_wav(path) -> tuple[int, np.ndarray]:
    """Read a mono WAV as float64; integer PCM is scaled to [-1, 1)."""
    rate, data = wavfile.read(path)
    if data.ndim != 1:
        raise ValueError(f"{path}: expected mono audio, got {data.ndim} channels")
    if data.dtype == np.int16:
        data = data / 32768.0
    elif data.dtype == np.int32:
        data = data / 2147483648.0
    elif data.dtype == np.uint8:
        data = (data.astype(np.float64) - 128.0) / 128.0
    return rate, np.asarray(data, dtype=np.float64)


def read_wav_float32(path) -> tuple[int, np.ndarray]:
    """Read a float32 WAV without conversion, for bit-exact comparisons."""
    rate, data = wavfile.read(path)
    if data.dtype != np.float32:
        raise ValueError(f"{path}: expected 32-bit float samples, got {data.dtype}")
    return rate, data
