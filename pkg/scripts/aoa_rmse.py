"""Bartlett AoA accuracy over random angles, next to the averaged CRB."""

import argparse
import math

import numpy as np

from jcas_track.scenario import crb_aoa_avg
from jcas_track.waveform import OfdmConfig, TargetTruth, bartlett_aoa, synthesize_array_snapshots


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--antennas", type=int, default=16)
    p.add_argument("--snapshots", type=int, default=256)
    p.add_argument("--snr-db", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()

    cfg = OfdmConfig(n_antennas=args.antennas, n_win=args.snapshots, snr_phi_db=args.snr_db)
    rng = np.random.default_rng(args.seed)
    err = np.empty(args.trials)
    for i in range(args.trials):
        aoa = math.radians(rng.uniform(-60.0, 60.0))
        snaps = synthesize_array_snapshots(cfg, TargetTruth(50.0, 0.0, aoa), rng)
        err[i] = bartlett_aoa(snaps) - aoa
    rmse = math.sqrt(np.mean(err**2))
    crb = math.sqrt(crb_aoa_avg(1.0, cfg.noise_variance, cfg.n_antennas, cfg.n_win))
    print(f"K={cfg.n_antennas} N_win={cfg.n_win} snr={args.snr_db} dB, {args.trials} trials")
    print(f"RMSE {rmse:.3e} rad = {math.degrees(rmse):.4f} deg")
    print(f"CRB  {crb:.3e} rad = {math.degrees(crb):.4f} deg")


if __name__ == "__main__":
    main()
