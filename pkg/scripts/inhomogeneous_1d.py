"""Harmonic levels behind the 1D impedance step: k-space against FDTD.

    python3 scripts/inhomogeneous_1d.py [--factor 16] [--cfl 0.1 0.2 0.3]
"""

import argparse

from kspace_westervelt.oracle import ReferenceNotConverged
from kspace_westervelt.validation import inhomogeneous_harmonics


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--factor", type=int, default=16)
    ap.add_argument("--cfl", type=float, nargs="+", default=[0.3])
    args = ap.parse_args()
    for cfl in args.cfl:
        try:
            diff_db, lse, _ = inhomogeneous_harmonics(cfl=cfl, factor=args.factor)
        except ReferenceNotConverged as exc:
            print(f"CFL {cfl:.2f}: {exc}; use a larger --factor")
            continue
        print(f"CFL {cfl:.2f}: harmonic differences dB " + " ".join(f"{d:+.3f}" for d in diff_db)
              + f", trace LSE {lse:.4f}")


if __name__ == "__main__":
    main()
