"""Compact Heisenberg nilmanifolds X_n = Gamma_n \\ H_n.

Points are (x, y, z) with x, y in R^n, z in R; the group law is
(x, y, z)(x', y', z') = (x + x', y + y', z + z' + <x, y'>), and the metric
is the left-invariant one making d/dx_j, d/dy_j + x_j d/dz, d/dz orthonormal.
The displayed eigenfunctions are invariant under left translation by
integer points, so the quotient is taken on the left.

Spectrum (positive Laplacian):

* Type I,  f_{k,h} = e^{2 pi i (<k,x> + <h,y>)},     lam = 4 pi^2 (|k|^2 + |h|^2);
* Type II, g_{q,m,h} = (2 pi |m|)^{n/4} e^{2 pi i (m z + <q,y>)}
           prod_j sum_k psi_{h_j}(sqrt(2 pi |m|)(x_j + q_j/m + k)) e^{2 pi i k m y_j},
           lam = 2 pi |m| (2 sum h + n + 2 pi |m|),
  with m != 0, h in N_0^n and q in {0..|m|-1}^n (q and q + m e_j coincide).

psi is the L2-normalized Hermite function; the (2 pi |m|)^{1/4} factor per
coordinate makes every g unit-norm.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT, NumericConfig
from .errors import ResolutionTooLow, TruncationFailure, UnsupportedVariantForGeometry
from .hermite import envelope_radius, hermite_table
from .measures import Atomic, Density, Geometry, MeasureSpec, Uniform, sample_quadrature
from .spectral import LineTable, SpectralAdapter, certified_sum
from .torus import FOUR_PI2, lattice_points, theta_bound

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class NilPoint:
    x: tuple[float, ...]
    y: tuple[float, ...]
    z: float

    @classmethod
    def from_flat(cls, p) -> "NilPoint":
        p = [float(v) for v in p]
        n = (len(p) - 1) // 2
        return cls(tuple(p[:n]), tuple(p[n : 2 * n]), p[2 * n]).reduce()

    def reduce(self) -> "NilPoint":
        """Representative in [0,1)^{2n+1}: left-multiply by the integer point (a, b, c)."""
        x, y = np.asarray(self.x), np.asarray(self.y)
        a, b = -np.floor(x), -np.floor(y)
        z = self.z + float(a @ y)
        return NilPoint(tuple((x + a).tolist()), tuple((y + b).tolist()), z - math.floor(z))

    def flat(self) -> np.ndarray:
        return np.array(self.x + self.y + (self.z,))

    def left_mul(self, a, b, c) -> "NilPoint":
        """(a, b, c) * self, unreduced."""
        a, b = np.asarray(a, float), np.asarray(b, float)
        return NilPoint(
            tuple((a + np.asarray(self.x)).tolist()),
            tuple((b + np.asarray(self.y)).tolist()),
            self.z + c + float(a @ np.asarray(self.y)),
        )


@dataclass(frozen=True)
class TypeIIndex:
    k: tuple[int, ...]
    h: tuple[int, ...]

    @property
    def eigenvalue(self) -> float:
        return FOUR_PI2 * (sum(v * v for v in self.k) + sum(v * v for v in self.h))


@dataclass(frozen=True)
class TypeIIIndex:
    q: tuple[int, ...]
    m: int
    h: tuple[int, ...]

    def __post_init__(self):
        if self.m == 0 or any(v < 0 for v in self.h) or len(self.q) != len(self.h):
            raise ValueError(f"invalid Type II index {self}")

    @property
    def eigenvalue(self) -> float:
        n, am = len(self.h), abs(self.m)
        return TWO_PI * am * (2 * sum(self.h) + n + TWO_PI * am)


def _as_points(p) -> np.ndarray:
    if isinstance(p, NilPoint):
        return p.flat()[None, :]
    arr = np.asarray(p, dtype=float)
    return arr[None, :] if arr.ndim == 1 else arr


def eval_f(index: TypeIIndex, p):
    """Type I exponential at one NilPoint / flat point, or at an array of flat points."""
    pts = _as_points(p)
    n = len(index.k)
    phase = np.mod(pts[:, :n] @ np.asarray(index.k, float) + pts[:, n : 2 * n] @ np.asarray(index.h, float), 1.0)
    out = np.exp(2j * math.pi * phase)
    return complex(out[0]) if isinstance(p, NilPoint) or np.ndim(p) == 1 else out


def _zak_sums(m: int, H: int, x: np.ndarray, y: np.ndarray, qs: np.ndarray, config: NumericConfig, window_scale: float = 1.0):
    """S[a, iq, h] = sum_k psi_h(sqrt(2 pi |m|)(x_a + q/m + k)) e^{2 pi i k m y_a} for h <= H."""
    s = math.sqrt(TWO_PI * abs(m))
    U = envelope_radius(H, config.hermite_envelope) * window_scale
    shift = x[:, None] + qs[None, :] / m
    kmin = math.floor(-U / s - shift.max())
    kmax = math.ceil(U / s - shift.min())
    if max(-kmin, kmax) > config.hermite_window_cap * max(window_scale, 1.0):
        raise TruncationFailure(f"lattice window |k| <= {max(-kmin, kmax)} exceeds {config.hermite_window_cap} (m={m}, h<={H})")
    ks = np.arange(kmin, kmax + 1, dtype=float)
    u = s * (shift[:, :, None] + ks[None, None, :])
    table = hermite_table(H, u, config.hermite_order_cap)  # (H+1, A, Q, K)
    phase = np.exp(2j * math.pi * np.mod(np.outer(y, ks) * m, 1.0))  # (A, K)
    return np.einsum("haqk,ak->aqh", table, phase)


def eval_g(index: TypeIIIndex, p, config: NumericConfig = DEFAULT, window_scale: float = 1.0):
    """Unit-norm Type II eigenfunction at one point or an array of flat points."""
    pts = _as_points(p)
    n, m = len(index.h), index.m
    out = (TWO_PI * abs(m)) ** (n / 4.0) * np.exp(
        2j * math.pi * np.mod(m * pts[:, 2 * n] + pts[:, n : 2 * n] @ np.asarray(index.q, float), 1.0)
    )
    for j in range(n):
        S = _zak_sums(m, index.h[j], pts[:, j], pts[:, n + j], np.array([float(index.q[j])]), config, window_scale)
        out = out * S[:, 0, index.h[j]]
    return complex(out[0]) if isinstance(p, NilPoint) or np.ndim(p) == 1 else out


# --------------------------------------------------------------------------- coefficients


def _check_geometry(spec: MeasureSpec) -> int:
    if spec.geometry.family != "heisenberg":
        raise UnsupportedVariantForGeometry(f"expected a heisenberg measure, got {spec.geometry.tag}")
    return spec.geometry.n


def _type1_continuous(spec: MeasureSpec, ks: np.ndarray, hs: np.ndarray) -> np.ndarray:
    """Continuous-part coefficients of f_{k,h}; Type II ones vanish (z-independent densities)."""
    out = np.zeros(len(ks), dtype=complex)
    for coef, leaf in spec.continuous():
        if isinstance(leaf, Uniform):
            out += coef * (np.all(ks == 0, axis=1) & np.all(hs == 0, axis=1))
        elif isinstance(leaf, Density):
            kh = np.hstack([ks, hs])
            kmax = np.abs(kh).max(axis=1)
            inside = np.flatnonzero(kmax <= leaf.degree)
            if inside.size:
                res = 4 * int(kmax[inside].max()) + 4
                nodes, w = sample_quadrature(MeasureSpec(spec.geometry, leaf), res)
                phase = np.mod(nodes[:, :-1] @ kh[inside].T, 1.0)
                out[inside] += coef * (w @ np.exp(2j * math.pi * phase))
    return out


def coeff(spec: MeasureSpec, index, resolution: int | None = None) -> complex:
    """mu_index = int phi_index dmu for a Type I or Type II index."""
    n = _check_geometry(spec)
    pts, w = spec.atoms()
    if isinstance(index, TypeIIndex):
        val = complex(eval_f(index, pts) @ w) if w.size else 0j
        ks, hs = np.array([index.k]), np.array([index.h])
        if resolution is not None:
            need = 4 * max(map(abs, index.k + index.h)) + 4
            if resolution < need:
                raise ResolutionTooLow(f"resolution {resolution} < {need}")
        return val + complex(_type1_continuous(spec, ks, hs)[0])
    if len(index.h) != n:
        raise ValueError("index dimension does not match the geometry")
    return complex(eval_g(index, pts) @ w) if w.size else 0j


# --------------------------------------------------------------------------- adapter


def _type2_hmax(m: int, n: int, cutoff: float) -> int:
    am = abs(m)
    return int(math.floor((cutoff / (TWO_PI * am) - n - TWO_PI * am) / 2.0 + 1e-12))


def _m_max(n: int, cutoff: float) -> int:
    # smallest Type II eigenvalue at |m| is 2 pi |m| (n + 2 pi |m|)
    m = 0
    while TWO_PI * (m + 1) * (n + TWO_PI * (m + 1)) <= cutoff:
        m += 1
    return m


def _h_multi(n: int, H: int) -> np.ndarray:
    """All h in N_0^n with sum h <= H, ordered by sum then lexicographically."""
    if n == 1:
        return np.arange(H + 1)[:, None]
    grid = np.array(list(itertools.product(range(H + 1), repeat=n)), dtype=np.int64).reshape(-1, n)
    grid = grid[grid.sum(axis=1) <= H]
    return grid[np.argsort(grid.sum(axis=1), kind="stable")]


class HeisenbergAdapter(SpectralAdapter):
    """Merged Type I / Type II lines (lam, |mu_index|^2, 1) in ascending lam."""

    def __init__(self, spec: MeasureSpec, config: NumericConfig = DEFAULT, window_scale: float = 1.0):
        super().__init__(config)
        self.n = _check_geometry(spec)
        self.spec = spec
        self.geometry = spec.geometry
        self.window_scale = window_scale
        self.pts, self.w = spec.atoms()

    # spectrum bookkeeping -------------------------------------------------

    def _type2_blocks(self, cutoff: float):
        n = self.n
        M = _m_max(n, cutoff)
        for am in range(1, M + 1):
            for m in (am, -am):
                H = _type2_hmax(m, n, cutoff)
                if H >= 0:
                    yield m, H

    def den_spectrum(self, cutoff: float):
        n = self.n
        kh = lattice_points(2 * n, cutoff / FOUR_PI2)
        eigs = [FOUR_PI2 * (kh**2).sum(axis=1).astype(float)]
        for m, H in self._type2_blocks(cutoff):
            hsum = _h_multi(n, H).sum(axis=1)
            lam = TWO_PI * abs(m) * (2 * hsum + n + TWO_PI * abs(m))
            eigs.append(np.repeat(lam[None, :], abs(m) ** n, axis=0).ravel())
        eigs = np.sort(np.concatenate(eigs), kind="stable")
        return eigs, np.ones_like(eigs)

    def count_lines(self, cutoff: float) -> int:
        n = self.n
        r = math.floor(math.sqrt(max(cutoff, 0.0) / FOUR_PI2))
        total = (2 * r + 1) ** (2 * n)
        for m, H in self._type2_blocks(cutoff):
            total += abs(m) ** n * math.comb(H + n, n)
        return total

    def type2_multiplicity(self, m: int, h: tuple[int, ...]) -> int:
        """Number of emitted lines carrying the index pair (m, h)."""
        lam = TWO_PI * abs(m) * (2 * sum(h) + self.n + TWO_PI * abs(m))
        return len(self._type2_indices(lam + 1e-9, m, h))

    def _type2_indices(self, cutoff: float, m: int, h: tuple[int, ...]):
        H = _type2_hmax(m, self.n, cutoff)
        if H < 0 or sum(h) > H:
            return []
        return list(itertools.product(range(abs(m)), repeat=self.n))

    # numerators -----------------------------------------------------------

    def _type2_block(self, m: int, H: int) -> tuple[np.ndarray, np.ndarray]:
        """(eigenvalues, |coeff|^2) for every q in {0..|m|-1}^n and |h| <= H."""
        n, am = self.n, abs(m)
        hm = _h_multi(n, H)
        lam = TWO_PI * am * (2 * hm.sum(axis=1) + n + TWO_PI * am)
        nq = am**n
        if not self.w.size:
            return np.repeat(lam[None, :], nq, axis=0).ravel(), np.zeros(nq * len(hm))
        pts, w = self.pts, self.w
        qs = np.arange(am, dtype=float)
        # per-coordinate Zak sums, S[j] has shape (A, |m|, H+1)
        S = [_zak_sums(m, H, pts[:, j], pts[:, n + j], qs, self.config, self.window_scale) for j in range(n)]
        qgrid = np.array(list(itertools.product(range(am), repeat=n)), dtype=np.int64).reshape(-1, n)
        pref = (TWO_PI * am) ** (n / 4.0) * np.exp(2j * math.pi * np.mod(m * pts[:, 2 * n], 1.0))
        coeffs = np.empty((nq, len(hm)), dtype=complex)
        for iq, q in enumerate(qgrid):
            g = pref[:, None] * np.exp(2j * math.pi * np.mod(pts[:, n : 2 * n] @ q, 1.0))[:, None]
            for j in range(n):
                g = g * S[j][:, q[j], :][:, hm[:, j]]
            coeffs[iq] = w @ g
        return np.repeat(lam[None, :], nq, axis=0).ravel(), (np.abs(coeffs) ** 2).ravel()

    def _build(self, cutoff: float) -> LineTable:
        n = self.n
        kh = lattice_points(2 * n, cutoff / FOUR_PI2)
        ks, hs = kh[:, :n], kh[:, n:]
        eigs = [FOUR_PI2 * (kh**2).sum(axis=1).astype(float)]
        c1 = _type1_continuous(self.spec, ks, hs)
        if self.w.size:
            phase = np.mod(ks @ self.pts[:, :n].T + hs @ self.pts[:, n : 2 * n].T, 1.0)
            c1 = c1 + np.exp(2j * math.pi * phase) @ self.w
        nums = [np.abs(c1) ** 2]
        for m, H in self._type2_blocks(cutoff):
            lam, num = self._type2_block(m, H)
            eigs.append(lam)
            nums.append(num)
        eigs = np.concatenate(eigs)
        nums = np.concatenate(nums)
        order = np.argsort(eigs, kind="stable")
        # Type II eigenfunctions are not unit-modulus: no uniform num <= den bound
        return LineTable(eigs[order], nums[order], np.ones(len(eigs)), cutoff, math.inf)

    def _trace_bound(self, tau: float) -> float:
        n = self.n
        type1 = theta_bound(FOUR_PI2 * tau) ** (2 * n)

        def term(m):
            return m**n * np.exp(-TWO_PI * tau * m * (n + TWO_PI * m)) / (-np.expm1(-2 * TWO_PI * tau * m)) ** n

        def ratio(m):
            return ((m + 1) / m) ** n * np.exp(-TWO_PI * tau * (n + TWO_PI * (2 * m + 1)))

        return type1 + 2.0 * certified_sum(term, ratio)


def heat_kernel_diag(p, t: float, eps: float = 1e-12, n: int | None = None, config: NumericConfig = DEFAULT) -> float:
    """K_t(p, p) = sum e^{-lam t} |phi(p)|^2 over the spectrum up to the certified trace cutoff."""
    point = p if isinstance(p, NilPoint) else NilPoint.from_flat(p)
    n = len(point.x) if n is None else n
    spec = MeasureSpec(Geometry("heisenberg", n), Atomic((tuple(point.reduce().flat().tolist()),), (1.0,)))
    adapter = HeisenbergAdapter(spec, config)
    table = adapter.lines(adapter.certified_cutoff(t, eps, 1.0))
    return math.fsum((table.num * np.exp(-table.eigenvalues * t)).tolist())
