"""Command-line surface: batch generation, convolution, mixing, benchmark, analysis."""
from __future__ import annotations

import argparse
import functools
import json
import math
import os
import statistics
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np
from scipy.signal import fftconvolve

from . import __version__
from .analysis import (InsufficientDecayError, direct_to_reverberant, estimate_t60,
                       export_edc_csv, export_spectrogram_csv, schroeder_edc,
                       spectrogram)
from .audio_io import read_wav, write_wav
from .config import SimulationConfig
from .ism import ism_filter, sample_shoebox
from .sampling import RNG_ALGORITHM, SEED_DERIVATION, derive_seed, rng_from_seed
from .synthesis import RirFilter, generate, resampler_margin

THREADS_ENV = "FRA_RIR_THREADS"
MIX_SNR_RANGE = (-8.0, 6.0)   # dB, draw range when --snr-db is omitted
MIX_DURATION_S = 6.0
# direct convolution below this cost estimate, FFT above
_FFT_CONV_THRESHOLD = 1 << 22


def resolve_threads(requested: int | None) -> int:
    """Thread count: explicit flag, else FRA_RIR_THREADS, else 1."""
    if requested is not None:
        value = requested
    elif os.environ.get(THREADS_ENV):
        value = int(os.environ[THREADS_ENV])
    else:
        value = 1
    if value < 1:
        raise ValueError(f"thread count must be >= 1, got {value}")
    return value


def _load_config(path: str | None) -> SimulationConfig:
    return SimulationConfig.from_json(path) if path else SimulationConfig()


def _run_pool(func, jobs, threads: int):
    if threads == 1 or len(jobs) <= 1:
        return [func(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, jobs, chunksize=max(1, len(jobs) // (threads * 4))))


# ---------------------------------------------------------------- generate

def _generate_one(job, config: SimulationConfig, out_dir: str, emit_early: bool):
    index, seed = job
    started = time.perf_counter()
    pair = generate(config, seed)
    elapsed = time.perf_counter() - started
    name = f"rir_{index:06d}.wav"
    write_wav(Path(out_dir) / name, config.sample_rate, pair.full.samples)
    record = {
        "file": name,
        "seed": seed,
        "t60": pair.scene.t60,
        "room_stat": pair.scene.room_stat,
        "reflection_coeff": pair.scene.reflection_coeff,
        "direct_dist": pair.scene.direct_dist,
        "direct_index": pair.full.direct_index,
        "length": len(pair.full),
        "elapsed_seconds": elapsed,
    }
    if emit_early:
        early_name = f"rir_{index:06d}_early.wav"
        write_wav(Path(out_dir) / early_name, config.sample_rate, pair.early.samples)
        record["early_file"] = early_name
    return record


def cmd_generate(args) -> int:
    config = _load_config(args.config)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    threads = resolve_threads(args.threads)

    if args.seeds:
        seeds = [int(s) for s in args.seeds.split(",")]
        if len(set(seeds)) != len(seeds):
            raise ValueError("explicit seed list contains duplicates")
        run_seed = None
    else:
        if args.count is None:
            raise ValueError("either --count with --seed or --seeds is required")
        run_seed = args.seed
        seeds = [derive_seed(run_seed, i) for i in range(args.count)]

    func = functools.partial(_generate_one, config=config, out_dir=str(out_dir),
                             emit_early=args.emit_early)
    records = _run_pool(func, list(enumerate(seeds)), threads)

    manifest = {
        "tool": "frarir",
        "version": __version__,
        "rng_algorithm": RNG_ALGORITHM,
        "seed_derivation": SEED_DERIVATION,
        "run_seed": run_seed,
        "sample_rate": config.sample_rate,
        "emit_early": args.emit_early,
        "highpass": "butterworth order 2, 80 Hz, single forward pass",
        "resampler_margin": resampler_margin(config),
        "config": config.to_dict(),
        "filters": records,
    }
    manifest_path = out_dir / "manifest.json"
    with open(manifest_path, "w") as fh:
        json.dump(manifest, fh, indent=2)
    print(json.dumps({"count": len(records), "out_dir": str(out_dir),
                      "manifest": str(manifest_path)}))
    return 0


# ---------------------------------------------------------------- convolve

def _convolve(signal: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    if len(signal) * len(kernel) > _FFT_CONV_THRESHOLD:
        return fftconvolve(signal, kernel, mode="full")
    return np.convolve(signal, kernel, mode="full")


def cmd_convolve(args) -> int:
    rir_rate, rir = read_wav(args.rir)
    in_rate, signal = read_wav(args.input)
    if rir_rate != in_rate:
        raise ValueError(f"sample rate mismatch: RIR {rir_rate} Hz vs input {in_rate} Hz")
    out = _convolve(signal, rir)
    peak = float(np.max(np.abs(out))) if len(out) else 0.0
    gain = 1.0
    if peak > 1.0:
        gain = 1.0 / peak
        out = out * gain
    write_wav(args.out, in_rate, out)
    print(json.dumps({"output": args.out, "length": len(out),
                      "normalized": gain != 1.0, "gain": gain}))
    return 0


# ---------------------------------------------------------------- mix

def _reverberate(signal: np.ndarray, rir: RirFilter, length: int) -> np.ndarray:
    out = _convolve(signal, rir.samples)[:length]
    if len(out) < length:
        out = np.concatenate([out, np.zeros(length - len(out))])
    return out


def cmd_mix(args) -> int:
    if not 1 <= len(args.noise) <= 2:
        raise ValueError(f"need one or two noise files, got {len(args.noise)}")
    config = _load_config(args.config)
    fs = config.sample_rate
    length = int(MIX_DURATION_S * fs)

    def _load(path):
        rate, data = read_wav(path)
        if rate != fs:
            raise ValueError(f"{path}: sample rate {rate} Hz != configured {fs} Hz")
        data = data[:length]
        if not np.any(data):
            raise ValueError(f"{path}: input is silent")
        return data

    speech = _load(args.speech)
    noises = [_load(p) for p in args.noise]

    master = rng_from_seed(args.seed)
    snr_db = args.snr_db if args.snr_db is not None else master.uniform(*MIX_SNR_RANGE)

    speech_pair = generate(config, derive_seed(args.seed, 0))
    speech_reverb = _reverberate(speech, speech_pair.full, length)
    target = _reverberate(speech, speech_pair.early, length)
    noise_sum = np.zeros(length)
    noise_seeds = []
    for i, noise in enumerate(noises):
        noise_seed = derive_seed(args.seed, i + 1)
        noise_seeds.append(noise_seed)
        pair = generate(config, noise_seed)
        noise_sum += _reverberate(noise, pair.full, length)

    speech_energy = float(np.sum(speech_reverb ** 2))
    noise_energy = float(np.sum(noise_sum ** 2))
    if speech_energy <= 0.0 or noise_energy <= 0.0:
        raise ValueError("reverberated speech or noise is silent")
    gain = math.sqrt(speech_energy / (noise_energy * 10.0 ** (snr_db / 10.0)))
    noise_scaled = gain * noise_sum
    mixture = speech_reverb + noise_scaled

    out = Path(args.out)
    target_path = out.with_name(out.stem + "_target.wav")
    write_wav(out, fs, mixture)
    write_wav(target_path, fs, target)
    result = {
        "mixture": str(out),
        "target": str(target_path),
        "snr_db": snr_db,
        "measured_snr_db": 10.0 * math.log10(
            speech_energy / float(np.sum(noise_scaled ** 2))),
        "speech_seed": derive_seed(args.seed, 0),
        "noise_seeds": noise_seeds,
    }
    if args.dump_components:
        speech_path = out.with_name(out.stem + "_speech_reverb.wav")
        noise_path = out.with_name(out.stem + "_noise_scaled.wav")
        write_wav(speech_path, fs, speech_reverb)
        write_wav(noise_path, fs, noise_scaled)
        result["speech_reverb"] = str(speech_path)
        result["noise_scaled"] = str(noise_path)
    print(json.dumps(result))
    return 0


# ---------------------------------------------------------------- benchmark

def _bench_fra(job, config: SimulationConfig):
    _, seed = job
    started = time.perf_counter()
    generate(config, seed)
    return time.perf_counter() - started


def _bench_ism(job, config: SimulationConfig):
    _, seed = job
    room = sample_shoebox(rng_from_seed(seed), config)
    started = time.perf_counter()
    ism_filter(room, config)
    return time.perf_counter() - started


def cmd_benchmark(args) -> int:
    config = _load_config(args.config)
    threads = resolve_threads(args.threads)
    seeds = [derive_seed(args.seed, i) for i in range(args.count)]
    worker = _bench_fra if args.method == "fra" else _bench_ism
    func = functools.partial(worker, config=config)
    wall_start = time.perf_counter()
    times = _run_pool(func, list(enumerate(seeds)), threads)
    wall = time.perf_counter() - wall_start
    report = {
        "method": args.method,
        "count": args.count,
        "threads": threads,
        "median_s": statistics.median(times),
        "p90_s": float(np.percentile(times, 90)),
        "total_s": wall,
        "filters_per_s": args.count / wall,
    }
    print(json.dumps(report))
    return 0


# ---------------------------------------------------------------- analyze

def cmd_analyze(args) -> int:
    rate, samples = read_wav(args.rir)
    filt = RirFilter(sample_rate=rate, samples=samples,
                     direct_index=int(np.argmax(np.abs(samples))))
    edc = schroeder_edc(filt)
    insufficient = False
    t60 = None
    try:
        t60 = estimate_t60(edc, rate)
    except InsufficientDecayError:
        insufficient = True
    drr = direct_to_reverberant(filt)

    prefix = args.out_prefix or str(Path(args.rir).with_suffix(""))
    edc_path = f"{prefix}_edc.csv"
    export_edc_csv(edc_path, edc)
    spec_path = None
    if len(samples) >= 256:
        spec_path = f"{prefix}_spectrogram.csv"
        export_spectrogram_csv(spec_path, spectrogram(samples))
    print(json.dumps({
        "file": args.rir,
        "estimated_t60": t60,
        "insufficient_decay": insufficient,
        "drr_db": drr,
        "direct_index": filt.direct_index,
        "edc_csv": edc_path,
        "spectrogram_csv": spec_path,
    }))
    return 0


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="frarir",
        description="Fast stochastic room-impulse-response generation")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="batch-generate RIR files")
    gen.add_argument("--count", type=int, default=None)
    gen.add_argument("--seed", type=int, default=0, help="run seed for derived filters")
    gen.add_argument("--seeds", type=str, default=None,
                     help="comma-separated explicit per-filter seeds (bypasses derivation)")
    gen.add_argument("--config", type=str, default=None, help="JSON config file")
    gen.add_argument("--out", type=str, required=True)
    gen.add_argument("--emit-early", action="store_true")
    gen.add_argument("--threads", type=int, default=None)
    gen.set_defaults(func=cmd_generate)

    conv = sub.add_parser("convolve", help="convolve audio with an RIR file")
    conv.add_argument("--rir", required=True)
    conv.add_argument("--input", required=True)
    conv.add_argument("--out", required=True)
    conv.set_defaults(func=cmd_convolve)

    mix = sub.add_parser("mix", help="simulate a reverberant noisy mixture")
    mix.add_argument("--speech", required=True)
    mix.add_argument("--noise", action="append", required=True,
                     help="noise file; repeat for a second one")
    mix.add_argument("--snr-db", type=float, default=None,
                     help="target speech/noise SNR; drawn from [-8, 6] dB if omitted")
    mix.add_argument("--seed", type=int, required=True)
    mix.add_argument("--config", type=str, default=None)
    mix.add_argument("--out", required=True)
    mix.add_argument("--dump-components", action="store_true")
    mix.set_defaults(func=cmd_mix)

    bench = sub.add_parser("benchmark", help="time filter generation")
    bench.add_argument("--method", choices=("fra", "ism"), required=True)
    bench.add_argument("--count", type=int, default=100)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--threads", type=int, default=None)
    bench.add_argument("--config", type=str, default=None)
    bench.set_defaults(func=cmd_benchmark)

    ana = sub.add_parser("analyze", help="decay analysis of an RIR file")
    ana.add_argument("--rir", required=True)
    ana.add_argument("--out-prefix", type=str, default=None)
    ana.set_defaults(func=cmd_analyze)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # one parsable line per failure, nonzero exit
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
