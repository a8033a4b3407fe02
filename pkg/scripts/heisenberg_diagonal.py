#!/usr/bin/env python3
"""Spread of the heat-kernel diagonal K_t(p, p) on the Heisenberg nilmanifold.

For each t, evaluates K_t at seeded random points and at the two extreme
points (0, 0, 0) and (1/2, 1/2, 0), and compares the relative spread with the
first Type II level's contribution 2 sqrt(2) theta(pi)^2 e^{-lam t} / trace,
lam = 2 pi (1 + 2 pi).
"""

import argparse
import math

import numpy as np
from scipy.special import gamma

from heatwiener.heisenberg import HeisenbergAdapter, heat_kernel_diag
from heatwiener.measures import Geometry, MeasureSpec, Uniform


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=8)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--t", type=float, nargs="*", default=[0.8, 0.6, 0.4, 0.3, 0.2, 0.1, 0.05, 0.02])
    args = ap.parse_args()

    pts = np.random.default_rng(args.seed).random((args.points, 3))
    adapter = HeisenbergAdapter(MeasureSpec(Geometry("heisenberg", 1), Uniform()))
    theta = math.pi**0.25 / gamma(0.75)
    lam = 2 * math.pi * (1 + 2 * math.pi)
    print(f"# seed={args.seed}")
    print("t,trace,random_spread,extreme_spread,first_level_prediction")
    for t in args.t:
        trace = adapter.heat_trace(t, 1e-12).trace
        vals = np.array([heat_kernel_diag(p, t) for p in pts])
        hi, lo = heat_kernel_diag((0, 0, 0), t), heat_kernel_diag((0.5, 0.5, 0), t)
        pred = 2 * math.sqrt(2) * theta**2 * math.exp(-lam * t) / trace
        print(f"{t:g},{trace:.12g},{np.ptp(vals) / vals.mean():.4g},{(hi - lo) / trace:.4g},{pred:.4g}")


if __name__ == "__main__":
    main()
