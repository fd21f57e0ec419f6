"""Reflection from the absorbing layer versus thickness.

Each run compares a probe trace against the same run on a domain twice as
long (where nothing returns in time) and reports the late-window residual.

    python3 scripts/absorber_reflection.py [--thickness 10 20 40 60]
"""

import argparse

from kspace_westervelt.validation import check_absorber


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--thickness", type=int, nargs="+", default=[10, 20, 40, 60])
    args = ap.parse_args()
    for n in args.thickness:
        res = check_absorber(thickness=n)
        print(f"thickness {n:>3}: {res.measured}")


if __name__ == "__main__":
    main()
