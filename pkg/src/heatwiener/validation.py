"""Per-geometry validation checks.

Each check compares an observed error against a tolerance; ``margin`` is
``tol - observed`` so a positive margin means the check passed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT, NumericConfig
from .heisenberg import (
    HeisenbergAdapter,
    TypeIIIndex,
    TypeIIndex,
    eval_f,
    eval_g,
    heat_kernel_diag,
)
from .measures import Geometry, MeasureSpec, Uniform, su2_quadrature_rule
from .spectral import geometric_schedule, sweep, trace_slope
from .su2 import SU2Adapter, character
from .torus import TorusAdapter


@dataclass(frozen=True)
class Check:
    name: str
    tol: float
    observed: float

    @property
    def margin(self) -> float:
        return self.tol - self.observed

    @property
    def passed(self) -> bool:
        return bool(self.observed < self.tol)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"CHECK {self.name} tol={self.tol:.3g} margin={self.margin:.6g} {status}"


SLOPE_SCHEDULE = (0.5, 0.5, 10)


def _uniform(geom: Geometry) -> MeasureSpec:
    return MeasureSpec(geom, Uniform())


def _slope_check(adapter, dim: int, tol: float, name: str = "trace_slope", schedule=SLOPE_SCHEDULE) -> Check:
    curve = sweep(adapter, geometric_schedule(*schedule))
    return Check(name, tol, abs(trace_slope(curve) + dim / 2.0))


# --------------------------------------------------------------------------- torus


def poisson_error(d: int, t: float, config: NumericConfig = DEFAULT) -> float:
    """Relative gap between the certified lattice heat trace and (4 pi t)^{-d/2}."""
    adapter = TorusAdapter(_uniform(Geometry("torus", d)), config)
    trace = adapter.heat_trace(t, 1e-12).trace
    return abs(trace * (4 * math.pi * t) ** (d / 2.0) - 1.0)


def torus_checks(d: int, config: NumericConfig = DEFAULT) -> list[Check]:
    worst = max(poisson_error(d, t, config) for t in (0.01, 0.005, 0.002))
    return [
        Check("poisson_trace", 1e-6, worst),
        _slope_check(TorusAdapter(_uniform(Geometry("torus", d)), config), d, 0.05),
    ]


# --------------------------------------------------------------------------- SU(2)


def character_gram_error(n_weights: int = 12) -> float:
    """max |<chi_a, chi_b>_Haar - delta_ab / d_a^2| over the first weights (Weyl integration)."""
    lam = np.arange(n_weights) / 2.0
    theta, w = su2_quadrature_rule(2 * n_weights + 2)
    X = character(lam[:, None], theta[None, :])
    G = (X * w) @ X.T
    return float(np.abs(G - np.diag(1.0 / (2 * lam + 1) ** 2)).max())


def su2_checks(config: NumericConfig = DEFAULT) -> list[Check]:
    geom = Geometry("su2", 1)
    return [
        Check("character_orthogonality", 1e-12, character_gram_error()),
        _slope_check(SU2Adapter(_uniform(geom), "matrix", config), 3, 0.1, "trace_slope_matrix"),
    ]


# --------------------------------------------------------------------------- Heisenberg


GRAM_SAMPLE = (
    TypeIIndex((0,), (0,)),
    TypeIIndex((1,), (0,)),
    TypeIIndex((0,), (-1,)),
    TypeIIndex((1,), (1,)),
    TypeIIIndex((0,), 1, (0,)),
    TypeIIIndex((0,), 1, (1,)),
    TypeIIIndex((0,), -1, (2,)),
    TypeIIIndex((0,), 2, (0,)),
    TypeIIIndex((1,), 2, (0,)),
    TypeIIIndex((1,), -2, (1,)),
)


def heisenberg_gram(indices=GRAM_SAMPLE, grid: int = 48, zgrid: int = 16, config: NumericConfig = DEFAULT) -> np.ndarray:
    """Gram matrix of eigenfunctions on X_1 by the periodic midpoint rule."""
    g = (np.arange(grid) + 0.5) / grid
    gz = (np.arange(zgrid) + 0.5) / zgrid
    X, Y, Z = np.meshgrid(g, g, gz, indexing="ij")
    P = np.column_stack([X.ravel(), Y.ravel(), Z.ravel()])
    F = np.array([eval_f(i, P) if isinstance(i, TypeIIndex) else eval_g(i, P, config) for i in indices])
    return (F.conj() @ F.T) / len(P)


def diagonal_spread(t: float, points: np.ndarray, config: NumericConfig = DEFAULT) -> float:
    vals = np.array([heat_kernel_diag(p, t, 1e-12, config=config) for p in points])
    return float(np.ptp(vals) / vals.mean())


def diagonal_vs_trace(t: float, point, config: NumericConfig = DEFAULT) -> float:
    adapter = HeisenbergAdapter(_uniform(Geometry("heisenberg", len(point) // 2)), config)
    trace = adapter.heat_trace(t, 1e-12).trace
    return abs(heat_kernel_diag(point, t, 1e-12, config=config) / trace - 1.0)


def multiplicity_error(n: int = 1, cutoff: float = 2000.0, config: NumericConfig = DEFAULT) -> float:
    """Largest |lines emitted per (m, h) - |m|^n| among Type II eigenvalues below ``cutoff``.

    Lines are counted in the adapter's own spectrum. Type I eigenvalues are
    rational multiples of pi^2 and never coincide with Type II ones, and each
    Type II level (|m|, sum h) is shared by +-m and by the C(sum h + n - 1, n - 1)
    multi-indices h of that sum.
    """
    adapter = HeisenbergAdapter(_uniform(Geometry("heisenberg", n)), config)
    eigs, _ = adapter.den_spectrum(cutoff)
    worst = 0.0
    for m, H in adapter._type2_blocks(cutoff):
        if m < 0:
            continue
        for hs in range(H + 1):
            lam = 2 * math.pi * m * (2 * hs + n + 2 * math.pi * m)
            lines = int(np.sum(np.abs(eigs - lam) <= 1e-9 * lam))
            per_index = lines / (2 * math.comb(hs + n - 1, n - 1))
            worst = max(worst, abs(per_index - m**n))
    return worst


def truncation_doubling_error(points: np.ndarray, config: NumericConfig = DEFAULT) -> float:
    worst = 0.0
    for idx in GRAM_SAMPLE:
        if isinstance(idx, TypeIIIndex):
            a = eval_g(idx, points, config)
            b = eval_g(idx, points, config, window_scale=2.0)
            worst = max(worst, float(np.abs(a - b).max()))
    return worst


def heisenberg_checks(n: int, seed: int = 0, config: NumericConfig = DEFAULT) -> list[Check]:
    rng = np.random.default_rng(seed)
    points = rng.random((8, 2 * n + 1))
    checks = [Check(f"diagonal_constancy_t={t:g}", 1e-5, diagonal_spread(t, points, config)) for t in (0.2, 0.4)]
    checks.append(Check("diagonal_vs_trace_t=0.4", 1e-6, diagonal_vs_trace(0.4, points[0], config)))
    if n == 1:
        G = heisenberg_gram(config=config)
        checks.append(Check("orthonormality", 1e-6, float(np.abs(G - np.eye(len(G))).max())))
        checks.append(Check("truncation_doubling", 1e-13, truncation_doubling_error(points, config)))
    checks.append(Check("type2_multiplicity", 0.5, multiplicity_error(n, config=config)))
    adapter = HeisenbergAdapter(_uniform(Geometry("heisenberg", n)), config)
    # higher n: stop where the line count stays within capacity
    schedule = SLOPE_SCHEDULE if n == 1 else (0.5, 0.5, 7)
    checks.append(_slope_check(adapter, 2 * n + 1, 0.1, schedule=schedule))
    return checks


def run_checks(geometry: Geometry, seed: int = 0, config: NumericConfig = DEFAULT) -> list[Check]:
    if geometry.family == "torus":
        return torus_checks(geometry.n, config)
    if geometry.family == "su2":
        return su2_checks(config)
    return heisenberg_checks(geometry.n, seed, config)
