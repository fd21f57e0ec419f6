"""2D k-space snapshots against the fine-grid FDTD reference.

    python3 scripts/compare_2d.py sec3c_2d_homogeneous [--factor 8] [--initial band_limited]

Prints the least-square error inside the central 2.5 cm x 2.5 cm window at
each snapshot time and optionally saves both fields to an .npz file.
"""

import argparse
import time

import numpy as np

from kspace_westervelt.analysis import least_square_error
from kspace_westervelt.config import load_preset
from kspace_westervelt.oracle.fdtd import fdtd_reference
from kspace_westervelt.solver import run


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("preset")
    ap.add_argument("--factor", type=int, default=8)
    ap.add_argument("--initial", choices=("band_limited", "analytic"), default="band_limited")
    ap.add_argument("--window", type=float, default=0.0125, help="half width of the comparison window (m)")
    ap.add_argument("--save", help="write k-space and reference snapshots to this .npz")
    args = ap.parse_args()

    cfg = load_preset(args.preset)
    t0 = time.perf_counter()
    ks = run(cfg)
    t1 = time.perf_counter()
    ref = fdtd_reference(cfg, factor=args.factor, initial=args.initial)
    t2 = time.perf_counter()
    chk = ref.report["self_check"]
    print(f"k-space {t1 - t0:.1f} s, FDTD x{args.factor} {t2 - t1:.1f} s, "
          f"reference error estimate {chk['estimated_error']:.4f}")
    X, Y = cfg.build_grid().coords()
    win = (np.abs(X) <= args.window) & (np.abs(Y) <= args.window)
    for a, b in zip(ks.snapshots, ref.snapshots):
        print(f"t = {a.time * 1e6:6.2f} us  LSE {least_square_error(a.pressure[win], b.pressure[win]):.4f}")
    if args.save:
        np.savez(args.save, **{f"ks_{a.step}": a.pressure for a in ks.snapshots},
                 **{f"ref_{b.step}": b.pressure for b in ref.snapshots})


if __name__ == "__main__":
    main()
