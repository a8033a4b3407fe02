"""Tolerance and budget constants shared by every module."""

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class NumericConfig:
    # relative truncation error targeted by heat_ratio
    eps: float = 1e-8
    # tail certificate: sum_{lam > L} den e^{-lam t} <= e^{-(1-s) t L} * Z(s t)
    tail_split: float = 0.2
    # multiplies every certified spectral cutoff; 2.0 = "doubled truncation budget"
    budget_scale: float = 1.0
    max_lines: int = 3_000_000

    mass_tol: float = 1e-12
    quaternion_tol: float = 1e-12
    ratio_tol: float = 1e-9

    cantor_tol: float = 1e-8

    # su2 characters switch to the Taylor branch when |sin(pi theta)| < this
    taylor_window: float = 1e-6
    quadrature_node_cap: int = 4_000_000

    hermite_order_cap: int = 8192
    hermite_envelope: float = 1e-14
    hermite_window_cap: int = 64

    beta_bounds: tuple[float, float] = (0.25, 2.0)
    min_extrapolation_samples: int = 4

    def with_(self, **kw) -> "NumericConfig":
        return replace(self, **kw)


DEFAULT = NumericConfig()
