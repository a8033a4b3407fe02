"""Geometry-independent machinery: heat-weighted Wiener ratio, Cesaro average,
tail-certified summation, sweeps over a t-schedule and t -> 0+ extrapolation.

Conventions: eigenvalues are those of the positive Laplacian, so every weight
``exp(-lambda t)`` lies in (0, 1]. All exponential sums are reduced with
``math.fsum`` (exactly rounded, hence order independent and reproducible).
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .config import DEFAULT, NumericConfig
from .errors import NonfiniteTerm, TailBoundUnavailable, TooFewSamples

TailBound = Callable[[np.ndarray, float], np.ndarray]


@dataclass(frozen=True)
class SpectralLine:
    """One eigenvalue with aggregated weights.

    ``sup_sq`` bounds sup|phi|^2 over the aggregated eigenfunctions, so
    num_weight <= den_weight * sup_sq; it is 1 for unit-modulus bases (torus
    exponentials, SU(2) characters and matrix coefficients) and ``inf`` where
    no uniform bound is certified.
    """

    eigenvalue: float
    num_weight: float
    den_weight: float
    sup_sq: float = 1.0

    def __post_init__(self):
        if not (self.eigenvalue >= 0 and self.num_weight >= 0 and self.den_weight >= 1):
            raise ValueError(f"invalid spectral line {self}")
        if self.num_weight > self.den_weight * self.sup_sq * (1 + DEFAULT.ratio_tol):
            raise ValueError(f"num_weight exceeds den_weight in {self}")


@dataclass(frozen=True, eq=False)
class LineTable:
    """Spectral lines in nondecreasing eigenvalue order, stored column-wise.

    ``cutoff`` states that every line with eigenvalue <= cutoff is present;
    ``sup_sq`` is the per-line bound num <= den * sup_sq (see SpectralLine).
    """

    eigenvalues: np.ndarray
    num: np.ndarray
    den: np.ndarray
    cutoff: float = math.inf
    sup_sq: float = 1.0

    def __post_init__(self):
        lam = np.asarray(self.eigenvalues, dtype=float)
        object.__setattr__(self, "eigenvalues", lam)
        object.__setattr__(self, "num", np.asarray(self.num, dtype=float))
        object.__setattr__(self, "den", np.asarray(self.den, dtype=float))
        if not (lam.shape == self.num.shape == self.den.shape and lam.ndim == 1):
            raise ValueError("eigenvalues, num and den must be 1-d arrays of equal length")
        if lam.size and np.any(np.diff(lam) < 0):
            raise ValueError("lines must be ordered by nondecreasing eigenvalue")

    @classmethod
    def from_lines(cls, lines: Iterable[SpectralLine], cutoff: float = math.inf) -> "LineTable":
        lines = list(lines)
        rows = [(ln.eigenvalue, ln.num_weight, ln.den_weight) for ln in lines]
        arr = np.array(rows, dtype=float).reshape(-1, 3)
        sup_sq = max((ln.sup_sq for ln in lines), default=1.0)
        return cls(arr[:, 0], arr[:, 1], arr[:, 2], cutoff, sup_sq)

    def __len__(self) -> int:
        return self.eigenvalues.size

    def __iter__(self) -> Iterator[SpectralLine]:
        for lam, a, b in zip(self.eigenvalues.tolist(), self.num.tolist(), self.den.tolist()):
            yield SpectralLine(lam, a, b, self.sup_sq)

    def upto(self, cutoff: float) -> "LineTable":
        end = int(np.searchsorted(self.eigenvalues, cutoff, side="right"))
        return LineTable(self.eigenvalues[:end], self.num[:end], self.den[:end], min(cutoff, self.cutoff), self.sup_sq)


@dataclass(frozen=True)
class HeatRatio:
    ratio: float
    trace: float
    error_bound: float
    cutoff: float
    lines_used: int


def _fsum(x: np.ndarray) -> float:
    return math.fsum(x.tolist())


def _select_cutoff(
    eigs: np.ndarray,
    den_terms: np.ndarray,
    t: float,
    eps: float,
    tail_bound: TailBound,
    table_cutoff: float,
    budget_scale: float,
) -> tuple[int, float, float]:
    """Smallest certified cutoff: tail_bound(L, t) <= eps * (partial denominator up to L).

    Candidates are ends of equal-eigenvalue groups plus the table cutoff.
    Returns ``(lines to consume, cutoff, absolute tail bound)``.
    """
    n = eigs.size
    if n:
        ends = np.flatnonzero(np.r_[eigs[1:] != eigs[:-1], True])
        cand = eigs[ends]
        partial = np.cumsum(den_terms)[ends]
    else:
        ends = np.zeros(0, dtype=int)
        cand = partial = np.zeros(0)
    if math.isfinite(table_cutoff) and (n == 0 or table_cutoff > eigs[-1]):
        cand = np.r_[cand, table_cutoff]
        partial = np.r_[partial, partial[-1] if n else 0.0]
        ends = np.r_[ends, n - 1]
    ok = np.flatnonzero(np.asarray(tail_bound(cand, t)) <= eps * partial)
    if ok.size == 0:
        raise TailBoundUnavailable(t, f"lines up to eigenvalue {table_cutoff:.6g} do not reach relative tail {eps:g}")
    lam = float(cand[ok[0]])
    if budget_scale != 1.0:
        lam *= budget_scale
        if lam > table_cutoff:
            raise TailBoundUnavailable(t, f"scaled cutoff {lam:.6g} beyond enumerated range {table_cutoff:.6g}")
        end = int(np.searchsorted(eigs, lam, side="right"))
    else:
        end = int(ends[ok[0]]) + 1
    return end, lam, float(np.asarray(tail_bound(np.array([lam]), t))[0])


def heat_ratio(
    lines: LineTable | Iterable[SpectralLine],
    t: float,
    eps: float = DEFAULT.eps,
    tail_bound: TailBound | None = None,
    budget_scale: float = 1.0,
) -> HeatRatio:
    """Wiener ratio  sum num e^{-lam t} / sum den e^{-lam t}  with certified truncation.

    ``tail_bound(L, t)`` must bound  sum_{lam > L} den e^{-lam t}  over the
    whole spectrum; ``None`` declares the line stream complete.
    """
    if not t > 0:
        raise ValueError("t must be positive")
    table = lines if isinstance(lines, LineTable) else LineTable.from_lines(lines)
    with np.errstate(over="ignore", invalid="ignore"):
        decay = np.exp(-table.eigenvalues * t)
        den_terms = table.den * decay
        num_terms = table.num * decay
    if not (np.all(np.isfinite(num_terms)) and np.all(np.isfinite(den_terms))):
        bad = int(np.flatnonzero(~(np.isfinite(num_terms) & np.isfinite(den_terms)))[0])
        raise NonfiniteTerm(f"nonfinite term at line {bad} (eigenvalue {table.eigenvalues[bad]!r}) for t={t!r}")
    if tail_bound is None:
        end, cut, tail = len(table), math.inf, 0.0
    else:
        end, cut, tail = _select_cutoff(
            table.eigenvalues, den_terms, t, eps, tail_bound, table.cutoff, budget_scale
        )
    trace = _fsum(den_terms[:end])
    ratio = _fsum(num_terms[:end]) / trace
    return HeatRatio(ratio, trace, tail / trace, cut, end)


def cesaro_average(coeff: Callable[[np.ndarray], np.ndarray], N: int, d: int = 1) -> float:
    """Box average  (2N+1)^{-d} sum_{|k_i| <= N} |c(k)|^2  of torus Fourier coefficients.

    ``coeff`` maps an integer array of shape (m, d) to m complex values.
    """
    if N < 0:
        raise ValueError("N must be >= 0")
    side = np.arange(-N, N + 1)
    if d == 1:
        return math.fsum((np.abs(coeff(side[:, None])) ** 2).tolist()) / (2 * N + 1)
    rest = np.stack(np.meshgrid(*([side] * (d - 1)), indexing="ij"), axis=-1).reshape(-1, d - 1)
    total = []
    # one slab per first coordinate bounds memory for d >= 2
    for k0 in side:
        ks = np.hstack([np.full((len(rest), 1), k0), rest])
        total.extend((np.abs(coeff(ks)) ** 2).tolist())
    return math.fsum(total) / (2 * N + 1) ** d


def certified_sum(
    term: Callable[[np.ndarray], np.ndarray],
    ratio_bound: Callable[[np.ndarray], np.ndarray],
    start: int = 1,
    rel: float = 1e-16,
    block: int = 4096,
) -> float:
    """Upper bound on  sum_{m >= start} term(m)  for nonnegative terms.

    ``ratio_bound(M)`` must bound  term(m+1)/term(m)  for every m >= M; once it
    drops below 1 the remainder is closed with a geometric series.
    """
    total = 0.0
    m0 = start
    while True:
        ms = np.arange(m0, m0 + block, dtype=float)
        f = np.asarray(term(ms), dtype=float)
        r = np.asarray(ratio_bound(ms), dtype=float)
        cum = total + np.cumsum(f)
        with np.errstate(divide="ignore", invalid="ignore"):
            geo = np.where(r < 1.0, f * r / (1.0 - r), np.inf)
        ok = np.flatnonzero((geo <= rel * np.maximum(cum, 1e-300)) | ((f == 0) & (r < 1.0)))
        if ok.size:
            j = ok[0]
            return float(cum[j] + geo[j]) * (1.0 + 1e-12)
        total = float(cum[-1])
        m0 += block


# --------------------------------------------------------------------------- adapters


class SpectralAdapter:
    """Common behaviour of the geometry adapters.

    Subclasses bind one measure and implement

    * ``den_spectrum(cutoff)`` -> (eigenvalues, den) sorted, cheap;
    * ``count_lines(cutoff)`` -> number of lines with eigenvalue <= cutoff;
    * ``_build(cutoff)`` -> LineTable with numerators;
    * ``trace_bound(tau)`` -> certified upper bound on the full heat trace.
    """

    geometry = None

    def __init__(self, config: NumericConfig = DEFAULT):
        self.config = config
        self._table: LineTable | None = None
        self._zcache: dict[float, float] = {}

    def den_spectrum(self, cutoff: float) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def count_lines(self, cutoff: float) -> int:
        raise NotImplementedError

    def _build(self, cutoff: float) -> LineTable:
        raise NotImplementedError

    def _trace_bound(self, tau: float) -> float:
        raise NotImplementedError

    def trace_bound(self, tau: float) -> float:
        if tau not in self._zcache:
            self._zcache[tau] = self._trace_bound(tau)
        return self._zcache[tau]

    def tail_bound(self, cutoffs, t: float) -> np.ndarray:
        s = self.config.tail_split
        return np.exp(-(1.0 - s) * t * np.asarray(cutoffs, dtype=float)) * self.trace_bound(s * t)

    def _cutoff_upper(self, t: float, eps: float) -> float:
        # valid because the partial denominator is always >= 1 (lambda = 0 line)
        s = self.config.tail_split
        exact = (math.log(self.trace_bound(s * t)) - math.log(eps)) / ((1.0 - s) * t)
        return exact * (1.0 + 1e-9) + 1e-9  # margin: the bound is met with equality at ``exact``

    def _check_capacity(self, cutoff: float, t: float) -> None:
        if not math.isfinite(cutoff) or self.count_lines(cutoff) > self.config.max_lines:
            raise TailBoundUnavailable(t, f"cutoff {cutoff:.6g} needs more than {self.config.max_lines} lines")

    def certified_cutoff(self, t: float, eps: float | None = None, budget_scale: float | None = None) -> float:
        eps = self.config.eps if eps is None else eps
        scale = self.config.budget_scale if budget_scale is None else budget_scale
        upper = self._cutoff_upper(t, eps)
        self._check_capacity(upper * scale, t)
        eigs, den = self.den_spectrum(upper)
        _, lam, _ = _select_cutoff(eigs, den * np.exp(-eigs * t), t, eps, self.tail_bound, upper, 1.0)
        return lam * scale

    def lines(self, cutoff: float) -> LineTable:
        if self._table is None or cutoff > self._table.cutoff:
            self._check_capacity(cutoff, math.nan)
            self._table = self._build(cutoff)
        return self._table.upto(cutoff)

    def enumerate_lines(self, t: float, eps: float | None = None) -> LineTable:
        """Lines up to the certified cutoff for ``t``."""
        return self.lines(self.certified_cutoff(t, eps))

    def heat_trace(self, t: float, eps: float | None = None) -> HeatRatio:
        eps = self.config.eps if eps is None else eps
        lam = self.certified_cutoff(t, eps, 1.0)
        eigs, den = self.den_spectrum(lam)
        return heat_ratio(LineTable(eigs, den, den, lam), t, eps, self.tail_bound)


# --------------------------------------------------------------------------- curves


def geometric_schedule(t0: float, ratio: float, samples: int) -> np.ndarray:
    if not (t0 > 0 and 0 < ratio < 1 and samples >= 1):
        raise ValueError("schedule needs t0 > 0, 0 < ratio < 1, samples >= 1")
    return t0 * ratio ** np.arange(samples)


@dataclass(frozen=True, eq=False)
class WienerCurve:
    """Sampled Wiener ratios; ``ratio_cap`` is the certified upper bound on W (1 for unit-modulus bases)."""

    t: np.ndarray
    ratio: np.ndarray
    trace: np.ndarray
    trunc_bound: np.ndarray
    header: str = field(default="t,ratio,trace,trunc_bound", repr=False)
    ratio_cap: float = 1.0

    def __post_init__(self):
        for name in ("t", "ratio", "trace", "trunc_bound"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        if self.t.size > 1 and np.any(np.diff(self.t) >= 0):
            raise ValueError("t must be strictly decreasing along the schedule")
        if np.any(self.trace < 1.0 - 1e-12):
            raise ValueError("heat trace below 1")
        if np.any(self.ratio < -DEFAULT.ratio_tol) or np.any(self.ratio > self.ratio_cap + DEFAULT.ratio_tol):
            raise ValueError(f"Wiener ratio outside [0, {self.ratio_cap:g}]")

    def __len__(self) -> int:
        return self.t.size

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(self.header + "\n")
        for row in zip(self.t, self.ratio, self.trace, self.trunc_bound):
            buf.write(",".join(f"{v:.17g}" for v in row) + "\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, ratio_cap: float = 1.0) -> "WienerCurve":
        rows = [ln.split(",") for ln in text.strip().splitlines()[1:]]
        arr = np.array(rows, dtype=float).reshape(-1, 4)
        return cls(arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3], ratio_cap=ratio_cap)


def sweep(
    adapter: SpectralAdapter,
    schedule: Sequence[float],
    eps: float | None = None,
    budget_scale: float | None = None,
) -> WienerCurve:
    """Evaluate the Wiener ratio along ``schedule`` (numerators computed once)."""
    eps = adapter.config.eps if eps is None else eps
    scale = adapter.config.budget_scale if budget_scale is None else budget_scale
    ts = [float(t) for t in schedule]
    if len(ts) > 1 and any(b >= a for a, b in zip(ts, ts[1:])):
        raise ValueError("schedule must be strictly decreasing")
    cutoffs = [adapter.certified_cutoff(t, eps, scale) for t in ts]
    table = adapter.lines(max(cutoffs))
    rows = []
    for t in ts:
        hr = heat_ratio(table, t, eps, adapter.tail_bound, scale)
        rows.append((t, hr.ratio, hr.trace, hr.error_bound))
    arr = np.array(rows).reshape(-1, 4)
    return WienerCurve(arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3], ratio_cap=table.sup_sq)


# --------------------------------------------------------------------------- extrapolation


@dataclass(frozen=True)
class AtomEstimate:
    estimate: float
    uncertainty: float
    method: str  # "plateau" | "power-fit"
    samples_used: int
    beta: float | None = None


def _power_fit(t: np.ndarray, w: np.ndarray, beta: float) -> tuple[float, float, float]:
    scale = t.max()
    basis = np.column_stack([np.ones_like(t), (t / scale) ** beta])
    coef, *_ = np.linalg.lstsq(basis, w, rcond=None)
    return float(coef[0]), float(coef[1]), float(np.linalg.norm(basis @ coef - w))


def extrapolate_limit(curve: WienerCurve, config: NumericConfig = DEFAULT) -> AtomEstimate:
    """Estimate lim_{t->0+} W(t) from the smallest-t half of the samples.

    Fits W ~ A + B t^beta with beta free in ``config.beta_bounds``. Falls back to
    the plateau (last sample, spread of the last three) when the window is flat
    or when the plateau spread is already below the fit residual.
    """
    n = len(curve)
    if n < config.min_extrapolation_samples:
        raise TooFewSamples(f"extrapolation needs >= {config.min_extrapolation_samples} samples, got {n}")
    k = max(3, (n + 1) // 2)
    t, w = curve.t[-k:], curve.ratio[-k:]
    last3 = curve.ratio[-3:]
    plateau = AtomEstimate(float(w[-1]), float(last3.max() - last3.min()), "plateau", 3)
    if np.ptp(w) <= 1e-14 * max(1.0, float(np.abs(w).max())):
        return plateau

    lo, hi = config.beta_bounds
    grid = np.linspace(lo, hi, 176)
    res = np.array([_power_fit(t, w, b)[2] for b in grid])
    i = int(np.argmin(res))
    a, b = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    if b > a:
        opt = minimize_scalar(lambda x: _power_fit(t, w, x)[2], bounds=(a, b), method="bounded",
                              options={"xatol": 1e-10})
        beta = float(opt.x) if opt.fun <= res[i] else float(grid[i])
    else:
        beta = float(grid[i])
    A, B, resid = _power_fit(t, w, beta)
    if not math.isfinite(A) or plateau.uncertainty <= resid:
        return plateau
    return AtomEstimate(A, max(resid, abs(float(w[-1]) - A)), "power-fit", k, beta)


def trace_slope(curve: WienerCurve) -> float:
    """Least-squares slope of log(trace) against log(t) over the smallest-t third."""
    n = len(curve)
    if n < 3:
        raise TooFewSamples(f"trace slope needs >= 3 samples, got {n}")
    k = max(3, n // 3)
    t, tr = curve.t[-k:], curve.trace[-k:]
    if np.any(tr <= 0):
        raise ValueError("trace must be positive")
    return float(np.polyfit(np.log(t), np.log(tr), 1)[0])
