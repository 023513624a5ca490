#!/usr/bin/env python3
"""Decay-calibration experiment: how well does T20 recover the drawn T60?

Sweeps the image count and reports the estimated/drawn T60 ratio for the
stochastic generator, plus a pipeline-free variant that rasterizes raw tap
energies directly (isolates the sampling model from the rate pipeline).
"""
import argparse
import dataclasses

import numpy as np

import frarir


def tap_level_estimate(scene, config, rate=200_000):
    c0 = config.sound_velocity
    times = np.concatenate([[scene.direct_dist / c0], scene.image_dists / c0])
    amps = np.concatenate([
        [1.0 / scene.direct_dist],
        scene.reflection_coeff ** scene.reflection_counts / scene.image_dists])
    grid = np.zeros(int(np.ceil(times.max() * rate)) + 1)
    np.add.at(grid, np.round(times * rate).astype(int), amps ** 2)
    filt = frarir.RirFilter(rate, np.sqrt(grid), 0)
    return frarir.estimate_t60(frarir.schroeder_edc(filt), rate)


def sweep(num_images, draws, seed, config):
    cfg = dataclasses.replace(config, num_images=num_images)
    full_rel, tap_rel = [], []
    for i in range(draws):
        pair = frarir.generate(cfg, frarir.derive_seed(seed, i))
        try:
            est = frarir.estimate_t60(
                frarir.schroeder_edc(pair.full), cfg.sample_rate)
            full_rel.append(est / pair.scene.t60 - 1.0)
        except frarir.InsufficientDecayError:
            pass
        try:
            tap_rel.append(tap_level_estimate(pair.scene, cfg) / pair.scene.t60 - 1.0)
        except frarir.InsufficientDecayError:
            pass
    return np.array(full_rel), np.array(tap_rel)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--draws", type=int, default=60)
    parser.add_argument("--seed", type=int, default=2024)
    parser.add_argument("--images", type=int, nargs="+",
                        default=[64, 128, 256, 512, 1024])
    args = parser.parse_args()

    config = frarir.SimulationConfig()
    print(f"{'I':>6} {'pipeline rel err':>22} {'tap-level rel err':>22} {'within30%':>10}")
    for num_images in args.images:
        full_rel, tap_rel = sweep(num_images, args.draws, args.seed, config)
        hits = np.sum(np.abs(full_rel) <= 0.30)
        print(f"{num_images:>6} {full_rel.mean():+10.3f} +- {full_rel.std():5.3f}"
              f" {tap_rel.mean():+10.3f} +- {tap_rel.std():5.3f}"
              f" {hits:>6}/{len(full_rel)}")


if __name__ == "__main__":
    main()
