"""Acceptance criteria, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v`` (lines are printed past the
capture) or directly with ``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import io
import json
import math
import os
import sys
import tempfile
from contextlib import redirect_stdout

import numpy as np
import pytest

from heatwiener.cli import RunConfig, cmd_compare, cmd_estimate, main, make_adapter
from heatwiener.measures import validate
from heatwiener.spectral import cesaro_average, extrapolate_limit, geometric_schedule, sweep, trace_slope
from heatwiener.su2 import UnitQuaternion, class_angle
from heatwiener.torus import coefficient_provider
from heatwiener.validation import diagonal_spread, heisenberg_gram, multiplicity_error

DEFAULT_SCHEDULE = geometric_schedule(0.5, 0.5, 10)
# the Cantor limit is approached like t^0.3; the default schedule stops at W ~ 0.18
CANTOR_SAMPLES = 24
CESARO_N = 2**12

G_GENERIC = UnitQuaternion.from_axis_angle(0.37, (1.0, 2.0, 3.0))
HEIS_GENERIC = [0.3141, 0.7182, 0.1618]


def atoms(geometry, *pairs):
    return {"geometry": geometry, "type": "atomic", "atoms": [{"point": p, "weight": w} for p, w in pairs]}


TORUS = {
    "pair": atoms("torus-1", (0.0, 0.5), (0.5, 0.5)),
    "quarter_atom": {
        "geometry": "torus-1",
        "type": "mixture",
        "components": [
            {"coefficient": 0.25, "measure": {"type": "atomic", "atoms": [{"point": 0.3, "weight": 1}]}},
            {"coefficient": 0.75, "measure": {"type": "uniform"}},
        ],
    },
    "uniform": {"geometry": "torus-1", "type": "uniform"},
    "delta": atoms("torus-1", (0.3, 1)),
}
CANTOR = {"geometry": "torus-1", "type": "cantor"}
SU2 = {
    "delta_e": atoms("su2", ([1, 0, 0, 0], 1)),
    "delta_minus_e": atoms("su2", ([-1, 0, 0, 0], 1)),
    "delta_i": atoms("su2", ([0, 1, 0, 0], 1)),
    "delta_generic": atoms("su2", (list(G_GENERIC.as_tuple()), 1)),
    "haar": {"geometry": "su2", "type": "uniform"},
    "half_e_half_g": atoms("su2", ([1, 0, 0, 0], 0.5), (list(G_GENERIC.as_tuple()), 0.5)),
}
HEIS = {
    "delta_origin": atoms("heisenberg-1", ([0, 0, 0], 1)),
    "delta_generic": atoms("heisenberg-1", (HEIS_GENERIC, 1)),
    "uniform": {"geometry": "heisenberg-1", "type": "uniform"},
    "pair": atoms("heisenberg-1", (HEIS_GENERIC, 0.5), ([0.8, 0.25, 0.6], 0.5)),
}


class Workspace:
    """Spec files and CLI runs in a scratch directory."""

    def __init__(self):
        self.dir = tempfile.mkdtemp(prefix="heatwiener-acc-")

    def path(self, name, spec):
        p = os.path.join(self.dir, f"{name}.json")
        with open(p, "w", encoding="utf-8") as fh:
            json.dump(spec, fh)
        return p

    def estimate(self, name, spec, **kw):
        cfg = RunConfig("estimate", spec=self.path(name, spec), out=os.path.join(self.dir, f"{name}.report"), **kw)
        est, _ = cmd_estimate(cfg)
        return est


WS = Workspace()


def _fmt(pairs):
    return " ".join(f"{k}={v:.3g}" if isinstance(v, float) else f"{k}={v}" for k, v in pairs)


# ----------------------------------------------------------------- criteria


def criterion_1():
    est = {k: WS.estimate(f"c1_{k}", v).estimate for k, v in TORUS.items()}
    curve = sweep(make_adapter(validate(TORUS["delta"])), DEFAULT_SCHEDULE)
    ok = (
        abs(est["pair"] - 0.5) <= 1e-3
        and abs(est["quarter_atom"] - 0.0625) <= 1e-3
        and est["uniform"] <= 1e-3
        and abs(est["delta"] - 1) <= 1e-6
        and np.all(np.abs(curve.ratio - 1) <= 1e-6)
    )
    return ok, _fmt(list(est.items()) + [("delta_max_dev", float(np.max(np.abs(curve.ratio - 1))))])


def _heat_estimate(spec, samples=10):
    curve = sweep(make_adapter(validate(spec)), geometric_schedule(0.5, 0.5, samples))
    return extrapolate_limit(curve).estimate


def criterion_2():
    diffs = {}
    cases = {**TORUS, "cantor": CANTOR}
    for name, spec in cases.items():
        heat = _heat_estimate(spec, CANTOR_SAMPLES if name == "cantor" else 10)
        ces = cesaro_average(coefficient_provider(validate(spec)), CESARO_N)
        diffs[name] = abs(ces - heat)
    return max(diffs.values()) <= 2e-3, _fmt(list(diffs.items()))


def criterion_3():
    est = _heat_estimate(CANTOR, CANTOR_SAMPLES)
    curve = sweep(make_adapter(validate(CANTOR)), DEFAULT_SCHEDULE)
    monotone = bool(np.all(np.diff(curve.ratio) < 0))
    return est <= 5e-3 and monotone, _fmt([("estimate", est), ("samples", CANTOR_SAMPLES), ("monotone_default", monotone)])


def criterion_4():
    est = {k: WS.estimate(f"c4_{k}", v, functional="matrix").estimate for k, v in SU2.items()}
    ok = all(abs(est[k] - 1) <= 1e-3 for k in ("delta_e", "delta_minus_e", "delta_i", "delta_generic"))
    ok = ok and est["haar"] <= 1e-3 and abs(est["half_e_half_g"] - 0.5) <= 2e-3
    return ok, _fmt(list(est.items()) + [("theta_generic", class_angle(G_GENERIC))])


def criterion_5():
    e = WS.estimate("c5_e", SU2["delta_e"], functional="character").estimate
    haar = WS.estimate("c5_haar", SU2["haar"], functional="character").estimate
    cfg = RunConfig("compare", spec=WS.path("c5_g", SU2["delta_generic"]), out=os.path.join(WS.dir, "c5_g.csv"))
    with redirect_stdout(io.StringIO()):
        _, report = cmd_compare(cfg)
    char_est = float(next(ln.split()[1] for ln in report.splitlines() if ln.startswith("character.estimate")))
    flagged = "DISCREPANCY functional=character" in report
    # the report must flag exactly when the deviation from sum w^2 = 1 exceeds 0.05
    flag_ok = flagged == (abs(char_est - 1.0) > 0.05)
    ok = abs(e - 1) <= 1e-3 and haar <= 1e-3 and flag_ok
    return ok, _fmt([("delta_e", e), ("haar", haar), ("noncentral_character_limit", char_est), ("flagged", flagged)])


def criterion_6():
    est = {k: WS.estimate(f"c6_{k}", v).estimate for k, v in HEIS.items()}
    ok = (
        abs(est["delta_origin"] - 1) <= 5e-3
        and abs(est["delta_generic"] - 1) <= 5e-3
        and est["uniform"] <= 5e-3
        and abs(est["pair"] - 0.5) <= 5e-3
    )
    return ok, _fmt(list(est.items()))


def criterion_7():
    pts = np.random.default_rng(0).random((8, 3))
    spread = {t: diagonal_spread(t, pts) for t in (0.2, 0.4)}
    gram = float(np.abs(heisenberg_gram() - np.eye(10)).max())
    mult = multiplicity_error(1)
    ok = all(v < 1e-5 for v in spread.values()) and gram <= 1e-6 and mult == 0
    return ok, _fmt([("spread_t0.2", spread[0.2]), ("spread_t0.4", spread[0.4]), ("gram_err", gram), ("mult_err", mult)])


def criterion_8():
    cases = {
        "torus-1": ({"geometry": "torus-1", "type": "uniform"}, 1, "matrix"),
        "torus-2": ({"geometry": "torus-2", "type": "uniform"}, 2, "matrix"),
        "su2-matrix": (SU2["haar"], 3, "matrix"),
        "heisenberg-1": (HEIS["uniform"], 3, "matrix"),
    }
    slopes = {}
    for name, (spec, d, functional) in cases.items():
        curve = sweep(make_adapter(validate(spec), functional), DEFAULT_SCHEDULE)
        slopes[name] = trace_slope(curve)
    ok = all(abs(slopes[k] + cases[k][1] / 2) <= 0.1 for k in cases)
    return ok, _fmt(list(slopes.items()))


def _all_sweeps():
    for name, spec in TORUS.items():
        yield f"torus:{name}", spec, "matrix"
    yield "torus:cantor", CANTOR, "matrix"
    for name, spec in SU2.items():
        for functional in ("matrix", "character"):
            yield f"su2:{name}:{functional}", spec, functional
    for name, spec in HEIS.items():
        yield f"heis:{name}", spec, "matrix"


def criterion_9():
    worst, identical = 0.0, True
    for name, spec, functional in _all_sweeps():
        adapter = lambda: make_adapter(validate(spec), functional)
        a = sweep(adapter(), DEFAULT_SCHEDULE)
        b = sweep(adapter(), DEFAULT_SCHEDULE, budget_scale=2.0)
        worst = max(worst, float(np.max(np.abs(a.ratio - b.ratio))))
        path = WS.path(name.replace(":", "_"), spec)
        outs = []
        for run in range(2):
            out = os.path.join(WS.dir, f"{name.replace(':', '_')}_{run}.csv")
            code = main(["sweep", "--spec", path, "--functional", functional, "--seed", "1234", "--out", out])
            with open(out, "rb") as fh:
                outs.append((code, fh.read()))
        identical = identical and outs[0] == outs[1] and outs[0][0] == 0
    return worst < 1e-9 and identical, _fmt([("max_budget_change", worst), ("byte_identical", identical)])


CRITERIA = [
    ("1", "torus wiener lemma", criterion_1),
    ("2", "cesaro vs heat agreement", criterion_2),
    ("3", "cantor measure", criterion_3),
    ("4", "su2 matrix functional", criterion_4),
    ("5", "su2 character functional", criterion_5),
    ("6", "heisenberg estimates", criterion_6),
    ("7", "heisenberg basis validation", criterion_7),
    ("8", "heat trace slopes", criterion_8),
    ("9", "numerical hygiene", criterion_9),
]


def run_criterion(number, title, fn):
    ok, detail = fn()
    line = f"ACCEPTANCE {number} [{title}] {'PASS' if ok else 'FAIL'} {detail}"
    return bool(ok), line


@pytest.mark.parametrize("number, title, fn", CRITERIA, ids=[f"criterion_{c[0]}" for c in CRITERIA])
def test_acceptance(number, title, fn, capsys):
    ok, line = run_criterion(number, title, fn)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [run_criterion(*c) for c in CRITERIA]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
