#!/usr/bin/env python3
"""Character vs matrix-coefficient functional for a point mass at class angle theta.

The matrix functional recovers the atom mass 1 at every theta; the character
functional does so only for central elements (theta = 0 or 1).
"""

import argparse

import numpy as np

from heatwiener.measures import validate
from heatwiener.spectral import extrapolate_limit, geometric_schedule, sweep
from heatwiener.su2 import SU2Adapter, UnitQuaternion


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=10)
    ap.add_argument("--thetas", type=float, nargs="*", default=[0.0, 0.05, 0.2, 0.37, 0.5, 0.8, 1.0])
    args = ap.parse_args()

    schedule = geometric_schedule(0.5, 0.5, args.samples)
    print("theta,W_character_limit,W_matrix_limit")
    for theta in args.thetas:
        g = UnitQuaternion.from_axis_angle(theta, (0.0, 0.6, 0.8))
        spec = validate({"geometry": "su2", "type": "atomic", "atoms": [{"point": list(g.as_tuple()), "weight": 1}]})
        lim = [extrapolate_limit(sweep(SU2Adapter(spec, f), schedule)).estimate for f in ("character", "matrix")]
        print(f"{theta:g},{lim[0]:.6g},{lim[1]:.6g}")


if __name__ == "__main__":
    main()
