#!/usr/bin/env python3
"""Heat-weighted vs Cesaro averages for a gallery of circle measures.

Writes one row per measure: atom power, heat estimate, Cesaro average at N = 2^12.
"""

import argparse

from heatwiener.measures import atom_power, validate
from heatwiener.spectral import cesaro_average, extrapolate_limit, geometric_schedule, sweep
from heatwiener.torus import TorusAdapter, coefficient_provider

GALLERY = {
    "delta": {"type": "atomic", "atoms": [{"point": 0.3, "weight": 1}]},
    "pair": {"type": "atomic", "atoms": [{"point": 0.0, "weight": 0.5}, {"point": 0.5, "weight": 0.5}]},
    "three_atoms": {"type": "atomic", "atoms": [{"point": 0.1, "weight": 0.2}, {"point": 0.35, "weight": 0.3}, {"point": 0.8, "weight": 0.5}]},
    "uniform": {"type": "uniform"},
    "bump": {"type": "density", "density": {"name": "cos2_bump", "power": 4, "center": [0.2]}},
    "atom_plus_bump": {
        "type": "mixture",
        "components": [
            {"coefficient": 0.4, "measure": {"type": "atomic", "atoms": [{"point": 0.6, "weight": 1}]}},
            {"coefficient": 0.6, "measure": {"type": "density", "density": {"name": "cos2_bump", "power": 2}}},
        ],
    },
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=10)
    ap.add_argument("--cesaro-power", type=int, default=12)
    args = ap.parse_args()
    print("measure,atom_power,heat_estimate,heat_uncertainty,cesaro")
    for name, body in GALLERY.items():
        spec = validate({"geometry": "torus-1", **body})
        est = extrapolate_limit(sweep(TorusAdapter(spec), geometric_schedule(0.5, 0.5, args.samples)))
        ces = cesaro_average(coefficient_provider(spec), 2**args.cesaro_power)
        print(f"{name},{atom_power(spec).value:.6g},{est.estimate:.6g},{est.uncertainty:.3g},{ces:.6g}")


if __name__ == "__main__":
    main()
