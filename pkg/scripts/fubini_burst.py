"""Sine-burst harmonics at 0.3 shock distances against the Fubini series.

    python3 scripts/fubini_burst.py [--cfl 0.1 0.2 0.3 0.4]
"""

import argparse

import numpy as np

from kspace_westervelt.analysis import db_ratio
from kspace_westervelt.validation import burst_harmonics


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cfl", type=float, nargs="+", default=[0.1, 0.2, 0.3, 0.4])
    ap.add_argument("--harmonics", type=int, default=4)
    args = ap.parse_args()
    print(f"{'CFL':>5} {'sigma':>6}  " + "  ".join(f"{'B' + str(n) + ' dB':>9}" for n in range(1, args.harmonics + 1)))
    for cfl in args.cfl:
        amps, expected, sigma, _ = burst_harmonics(cfl, n_max=args.harmonics)
        err = db_ratio(np.asarray(amps), np.asarray(expected))
        print(f"{cfl:>5.2f} {sigma:>6.3f}  " + "  ".join(f"{e:>+9.3f}" for e in err))


if __name__ == "__main__":
    main()
