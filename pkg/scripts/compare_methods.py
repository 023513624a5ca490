#!/usr/bin/env python3
"""Export waveform and spectrogram CSVs for one stochastic and one geometric
filter so the two methods can be compared side by side."""
import argparse
from pathlib import Path

import numpy as np

import frarir
from frarir.analysis import export_spectrogram_csv


def export(tag, pair, out_dir, rate):
    np.savetxt(out_dir / f"{tag}_waveform.csv", pair.full.samples, fmt="%.10g")
    if len(pair.full) >= 256:
        export_spectrogram_csv(out_dir / f"{tag}_spectrogram.csv",
                               frarir.spectrogram(pair.full.samples))
    try:
        t60 = frarir.estimate_t60(frarir.schroeder_edc(pair.full), rate)
    except frarir.InsufficientDecayError:
        t60 = float("nan")
    print(f"{tag}: t60_drawn={pair.scene.t60:.3f} t60_est={t60:.3f} "
          f"drr={frarir.direct_to_reverberant(pair.full):+.1f} dB "
          f"len={len(pair.full)}")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", type=Path, default=Path("comparison"))
    args = parser.parse_args()

    config = frarir.SimulationConfig()
    args.out.mkdir(parents=True, exist_ok=True)
    export("fra", frarir.generate(config, args.seed), args.out, config.sample_rate)
    room = frarir.sample_shoebox(frarir.rng_from_seed(args.seed), config)
    export("ism", frarir.ism_filter(room, config), args.out, config.sample_rate)


if __name__ == "__main__":
    main()
