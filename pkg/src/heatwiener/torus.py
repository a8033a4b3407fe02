"""The flat torus T^d = R^d / Z^d.

Laplacian eigenfunctions are e^{2 pi i <k, x>}, k in Z^d, with eigenvalue
4 pi^2 |k|^2, each of multiplicity one in its own line.
"""

from __future__ import annotations

import math

import numpy as np

from .config import DEFAULT, NumericConfig
from .errors import ResolutionTooLow, UnsupportedVariantForGeometry
from .measures import CantorMiddleThirds, Density, MeasureSpec, Uniform, sample_quadrature
from .spectral import LineTable, SpectralAdapter, certified_sum

FOUR_PI2 = 4.0 * math.pi**2


def lattice_points(d: int, radius_sq: float) -> np.ndarray:
    """All k in Z^d with |k|^2 <= radius_sq, ordered by |k|^2 then lexicographically."""
    r = int(math.floor(math.sqrt(max(radius_sq, 0.0)) + 1e-12))
    side = np.arange(-r, r + 1)
    box = np.stack(np.meshgrid(*([side] * d), indexing="ij"), axis=-1).reshape(-1, d)
    norm2 = (box**2).sum(axis=1)
    keep = norm2 <= radius_sq
    box, norm2 = box[keep], norm2[keep]
    return box[np.argsort(norm2, kind="stable")]


def cantor_transform(xi, tol: float = DEFAULT.cantor_tol):
    """Fourier transform of the middle-thirds Cantor measure on [0, 1].

    mu^(xi) = e^{-pi i xi} prod_{j>=1} cos(2 pi xi / 3^j), truncated once
    2 pi |xi| / 3^J < tol.
    """
    x = np.asarray(xi, dtype=float)
    top = float(np.max(np.abs(x))) if x.size else 0.0
    J = 1 if top == 0 else max(1, math.ceil(math.log(2 * math.pi * top / tol) / math.log(3.0)) + 1)
    prod = np.ones_like(x)
    for j in range(1, J + 1):
        prod = prod * np.cos(2 * math.pi * x / 3.0**j)
    out = np.exp(-1j * math.pi * x) * prod
    return out if out.ndim else complex(out)


def _quadrature_coeffs(spec: MeasureSpec, ks: np.ndarray, resolution: int) -> np.ndarray:
    nodes, w = sample_quadrature(spec, resolution)
    phase = np.mod(ks @ nodes.T, 1.0)
    return np.exp(-2j * math.pi * phase) @ w


def fourier_coeff(spec: MeasureSpec, k, resolution: int | None = None) -> np.ndarray | complex:
    """mu^(k) = int e^{-2 pi i <k, x>} dmu(x) for one k (shape (d,)) or many (shape (m, d)).

    Catalog densities are trigonometric polynomials, so coefficients beyond
    their degree vanish exactly; the rest use the equispaced periodic rule with
    ``resolution >= 4 max|k_i| + 4`` points per axis.
    """
    geom = spec.geometry
    if geom.family != "torus":
        raise UnsupportedVariantForGeometry(f"fourier_coeff needs a torus measure, got {geom.tag}")
    d = geom.n
    ks = np.asarray(k, dtype=np.int64)
    single = ks.ndim <= 1
    ks = ks.reshape(-1, d)
    out = np.zeros(len(ks), dtype=complex)

    pts, w = spec.atoms()
    if w.size:
        phase = np.mod(ks @ pts.T, 1.0)
        out += np.exp(-2j * math.pi * phase) @ w
    for coef, leaf in spec.continuous():
        if isinstance(leaf, Uniform):
            out += coef * np.all(ks == 0, axis=1)
        elif isinstance(leaf, CantorMiddleThirds):
            out += coef * cantor_transform(ks[:, 0])
        elif isinstance(leaf, Density):
            kmax = np.abs(ks).max(axis=1)
            inside = np.flatnonzero(kmax <= leaf.degree)
            if inside.size:
                need = 4 * int(kmax[inside].max()) + 4
                res = need if resolution is None else resolution
                if res < need:
                    raise ResolutionTooLow(f"resolution {res} < {need} required for |k| = {int(kmax[inside].max())}")
                out[inside] += coef * _quadrature_coeffs(MeasureSpec(geom, leaf), ks[inside], res)
    return complex(out[0]) if single else out


def coefficient_provider(spec: MeasureSpec):
    """k-array -> mu^(k) callable, as consumed by ``cesaro_average``."""
    return lambda ks: fourier_coeff(spec, np.asarray(ks).reshape(-1, spec.geometry.n))


def theta_bound(b: float) -> float:
    """Certified upper bound on  sum_{k in Z} e^{-b k^2}."""
    tail = certified_sum(lambda k: np.exp(-b * k * k), lambda k: np.exp(-b * (2 * k + 1)))
    return 1.0 + 2.0 * tail


class TorusAdapter(SpectralAdapter):
    """Spectral lines (4 pi^2 |k|^2, |mu^(k)|^2, 1) for a measure on T^d."""

    def __init__(self, spec: MeasureSpec, config: NumericConfig = DEFAULT):
        super().__init__(config)
        if spec.geometry.family != "torus":
            raise UnsupportedVariantForGeometry(f"TorusAdapter needs a torus measure, got {spec.geometry.tag}")
        self.spec = spec
        self.geometry = spec.geometry
        self.d = spec.geometry.n

    def den_spectrum(self, cutoff: float):
        pts = lattice_points(self.d, cutoff / FOUR_PI2)
        eigs = FOUR_PI2 * (pts**2).sum(axis=1)
        return eigs.astype(float), np.ones(len(pts))

    def count_lines(self, cutoff: float) -> int:
        r = math.floor(math.sqrt(max(cutoff, 0.0) / FOUR_PI2))
        return (2 * r + 1) ** self.d

    def _build(self, cutoff: float) -> LineTable:
        pts = lattice_points(self.d, cutoff / FOUR_PI2)
        eigs = FOUR_PI2 * (pts**2).sum(axis=1).astype(float)
        num = np.abs(fourier_coeff(self.spec, pts)) ** 2
        # |mu^(k)| <= 1; clip roundoff so num <= den holds exactly
        return LineTable(eigs, np.minimum(num, 1.0), np.ones(len(pts)), cutoff)

    def _trace_bound(self, tau: float) -> float:
        return theta_bound(FOUR_PI2 * tau) ** self.d
