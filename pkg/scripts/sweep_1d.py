"""Spatial and temporal resolution sweeps on the 1D homogeneous pulse.

Runs the dx sweep (lambda/2 .. lambda/8 at 0.3 MHz, CFL 0.1) and the CFL
sweep (0.1 .. 0.4 at lambda/8) and prints each point against the finest run.

    python3 scripts/sweep_1d.py [--threads N]
"""

import argparse

from kspace_westervelt.cli import converge_table, sweep_config
from kspace_westervelt.config import load_preset


def show(axis, rows):
    print(f"\n{axis} sweep")
    for row in rows:
        for name, e in row["probes"].items():
            harm = " ".join(f"{x:+.3f}" for x in e.get("harmonics_db", []))
            print(f"  {axis}={row[axis]:.4g}  band {row['band_hz'] / 1e6:.3f} MHz  "
                  f"{name}: max band dev {e['max_band_db']:.3f} dB | harmonics dB {harm}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()
    cfg = load_preset("sec3a_1d_homogeneous")
    lam = cfg.medium.background.c / 0.3e6
    cfg.solver.cfl = 0.1
    show("dx", converge_table(cfg, "dx", [lam / 8, lam / 6, lam / 4, lam / 2], threads=args.threads))
    cfg = load_preset("sec3a_1d_homogeneous")
    cfg = sweep_config(cfg, "dx", lam / 8)
    show("cfl", converge_table(cfg, "cfl", [0.1, 0.2, 0.3, 0.4], threads=args.threads))


if __name__ == "__main__":
    main()
