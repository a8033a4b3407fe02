"""SU(2) as unit quaternions, with two spectral functionals.

* ``character``: lines (c_lam, |mu_lam|^2, 1) with normalized characters
  chi_lam (chi_lam(e) = 1) and Casimir c_lam = lam (1 + lam) / 2.
* ``matrix``: the full Peter-Weyl eigenbasis, aggregated per weight into
  lines (c_lam, d_lam * ||mu^(pi_lam)||_HS^2, d_lam^2).

Weights are handled through n = 2 lam + 1 = d_lam, so c_lam = (n^2 - 1) / 8.

The Hilbert-Schmidt weight needs no representation matrices:
||sum_j w_j pi(g_j)||_HS^2 = sum_{i,j} w_i w_j tr pi(g_i^{-1} g_j)
                           = d_lam sum_{i,j} w_i w_j chi_lam(g_i^{-1} g_j).
For a central (class) measure nu, int chi(h^{-1} g) dnu(h) = chi(g) nu_lam by
the functional equation of normalized characters, which closes every
cross term in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT, NumericConfig
from .errors import ResolutionTooLow, UnsupportedVariantForGeometry
from .measures import Density, MeasureSpec, Uniform, density_value, su2_quadrature_rule
from .spectral import LineTable, SpectralAdapter, certified_sum

FUNCTIONALS = ("character", "matrix")


@dataclass(frozen=True)
class UnitQuaternion:
    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        norm = math.sqrt(self.a**2 + self.b**2 + self.c**2 + self.d**2)
        if abs(norm - 1.0) > 1e-9:
            raise ValueError(f"not a unit quaternion (norm {norm!r})")

    @classmethod
    def normalized(cls, a, b, c, d) -> "UnitQuaternion":
        n = math.sqrt(a * a + b * b + c * c + d * d)
        return cls(a / n, b / n, c / n, d / n)

    @classmethod
    def from_axis_angle(cls, theta: float, axis=(1.0, 0.0, 0.0)) -> "UnitQuaternion":
        """Element with class angle ``theta``: cos(pi theta) + sin(pi theta) * axis."""
        ax = np.asarray(axis, dtype=float)
        ax = ax / np.linalg.norm(ax)
        s = math.sin(math.pi * theta)
        return cls.normalized(math.cos(math.pi * theta), *(s * ax))

    def __mul__(self, o: "UnitQuaternion") -> "UnitQuaternion":
        a1, b1, c1, d1 = self.as_tuple()
        a2, b2, c2, d2 = o.as_tuple()
        return UnitQuaternion.normalized(
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        )

    def inverse(self) -> "UnitQuaternion":
        return UnitQuaternion(self.a, -self.b, -self.c, -self.d)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)


def class_angle(g) -> float:
    """theta in [0, 1] with tr g = 2 cos(pi theta) in the defining representation.

    Computed as atan2(|vector part|, real part) / pi, which equals
    arccos(a) / pi on unit quaternions but keeps full precision near +-e.
    """
    a, b, c, d = g.as_tuple() if isinstance(g, UnitQuaternion) else g
    return math.atan2(math.sqrt(b * b + c * c + d * d), a) / math.pi


def _pairwise_class_angles(quats: np.ndarray) -> np.ndarray:
    """theta(g_i^{-1} g_j) from full quaternion products."""
    m = len(quats)
    a = quats[:, 0]
    v = quats[:, 1:]
    # g_i^{-1} g_j = conj(q_i) q_j: real part a_i a_j + <v_i, v_j>,
    # vector part a_i v_j - a_j v_i - v_i x v_j
    real = a[:, None] * a[None, :] + v @ v.T
    vec = a[:, None, None] * v[None, :, :] - a[None, :, None] * v[:, None, :] - np.cross(v[:, None, :], v[None, :, :])
    norm = np.sqrt(real**2 + (vec**2).sum(axis=-1))
    theta = np.arctan2(np.sqrt((vec**2).sum(axis=-1)) / norm, real / norm) / math.pi
    theta[np.arange(m), np.arange(m)] = 0.0
    return theta


def dimension(lam) -> np.ndarray:
    return 2 * np.asarray(lam, dtype=float) + 1


def casimir(lam) -> np.ndarray:
    lam = np.asarray(lam, dtype=float)
    return 0.5 * lam * (1 + lam)


def character(lam, theta, window: float = DEFAULT.taylor_window):
    """Normalized character sin(n pi theta) / (n sin(pi theta)), n = 2 lam + 1.

    Within ``|sin(pi theta)| < window`` of theta = 0 or 1 the quadratic Taylor
    form (+-1)(1 - (n^2 - 1) pi^2 delta^2 / 6) is used, delta the distance to
    the endpoint. Broadcasts over ``lam`` and ``theta``.
    """
    n = 2 * np.asarray(lam, dtype=float) + 1
    th = np.asarray(theta, dtype=float)
    n, th = np.broadcast_arrays(n, th)
    s = np.sin(np.pi * th)
    near = np.abs(s) < window
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = np.sin(n * np.pi * th) / (n * s)
    upper = th > 0.5
    delta = np.where(upper, 1.0 - th, th)
    sign = np.where(upper, np.where(np.mod(n - 1, 2) == 1, -1.0, 1.0), 1.0)
    taylor = sign * (1.0 - (n * n - 1) * (np.pi * delta) ** 2 / 6.0)
    out = np.where(near, taylor, direct)
    return out if out.ndim else float(out)


class _Parts:
    """Atomic / central-continuous decomposition of an SU(2) measure."""

    def __init__(self, spec: MeasureSpec):
        if spec.geometry.family != "su2":
            raise UnsupportedVariantForGeometry(f"expected an su2 measure, got {spec.geometry.tag}")
        self.spec = spec
        self.quats, self.w = spec.atoms()
        self.theta = np.array([class_angle(q) for q in self.quats])
        self.pair_theta = _pairwise_class_angles(self.quats) if self.w.size else np.zeros((0, 0))
        self.cont = spec.continuous()

    def atomic_char(self, lam: np.ndarray) -> np.ndarray:
        if not self.w.size:
            return np.zeros(lam.shape)
        return character(lam[:, None], self.theta[None, :]) @ self.w

    def continuous_char(self, lam: np.ndarray, resolution: int | None = None) -> np.ndarray:
        out = np.zeros(lam.shape)
        for coef, leaf in self.cont:
            if isinstance(leaf, Uniform):
                out += coef * (lam == 0)
            elif isinstance(leaf, Density):
                p = leaf.degree
                # chi_lam rho is a polynomial of degree 2 lam + p in cos(pi theta);
                # orthogonality kills every 2 lam > p
                inside = np.flatnonzero(2 * lam <= p)
                if inside.size:
                    need = int(2 * lam[inside].max()) + p + 2
                    res = need if resolution is None else resolution
                    if res < need:
                        raise ResolutionTooLow(f"resolution {res} < {need} for weight {lam[inside].max()}")
                    theta, wq = su2_quadrature_rule(res)
                    wq = wq * density_value(self.spec.geometry, leaf, theta)
                    out[inside] += coef * (character(lam[inside][:, None], theta[None, :]) @ wq)
        return out

    def atomic_pair(self, lam: np.ndarray) -> np.ndarray:
        if not self.w.size:
            return np.zeros(lam.shape)
        iu, ju = np.triu_indices(len(self.w), 1)
        diag = float(np.sum(self.w**2)) * np.ones(lam.shape)
        if iu.size == 0:
            return diag
        ww = self.w[iu] * self.w[ju]
        return diag + 2.0 * (character(lam[:, None], self.pair_theta[iu, ju][None, :]) @ ww)


def char_coeff(spec: MeasureSpec, lam, resolution: int | None = None):
    """mu_lam = int chi_lam dmu."""
    parts = _Parts(spec)
    lam_arr = np.atleast_1d(np.asarray(lam, dtype=float))
    out = parts.atomic_char(lam_arr) + parts.continuous_char(lam_arr, resolution)
    return out if np.ndim(lam) else float(out[0])


def hs_weight(spec: MeasureSpec, lam):
    """d_lam^2 * iint chi_lam(h^{-1} g) dmu(g) dmu(h)  ( = d_lam ||mu^(pi_lam)||_HS^2 )."""
    return _hs_from_parts(_Parts(spec), lam)


def _hs_from_parts(parts: _Parts, lam):
    lam_arr = np.atleast_1d(np.asarray(lam, dtype=float))
    a = parts.atomic_char(lam_arr)
    nu = parts.continuous_char(lam_arr)
    val = dimension(lam_arr) ** 2 * (parts.atomic_pair(lam_arr) + 2.0 * a * nu + nu * nu)
    return val if np.ndim(lam) else float(val[0])


class SU2Adapter(SpectralAdapter):
    def __init__(self, spec: MeasureSpec, functional: str = "matrix", config: NumericConfig = DEFAULT):
        super().__init__(config)
        if functional not in FUNCTIONALS:
            raise ValueError(f"functional must be one of {FUNCTIONALS}")
        self.parts = _Parts(spec)
        self.spec = spec
        self.geometry = spec.geometry
        self.functional = functional

    @staticmethod
    def _n_max(cutoff: float) -> int:
        # c = (n^2 - 1) / 8 <= cutoff
        return int(math.floor(math.sqrt(8.0 * max(cutoff, 0.0) + 1.0) + 1e-9))

    def den_spectrum(self, cutoff: float):
        n = np.arange(1, self._n_max(cutoff) + 1, dtype=float)
        den = n**2 if self.functional == "matrix" else np.ones_like(n)
        return (n * n - 1) / 8.0, den

    def count_lines(self, cutoff: float) -> int:
        return self._n_max(cutoff)

    def _build(self, cutoff: float) -> LineTable:
        n = np.arange(1, self._n_max(cutoff) + 1, dtype=float)
        lam = (n - 1) / 2
        if self.functional == "matrix":
            num, den = _hs_from_parts(self.parts, lam), n**2
        else:
            c = self.parts.atomic_char(lam) + self.parts.continuous_char(lam)
            num, den = c * c, np.ones_like(n)
        # hs weights are squared norms; clip quadrature roundoff into [0, den]
        num = np.clip(num, 0.0, den)
        return LineTable((n * n - 1) / 8.0, num, den, cutoff)

    def _trace_bound(self, tau: float) -> float:
        a = tau / 8.0
        if self.functional == "matrix":
            term = lambda n: n * n * np.exp(-a * (n * n - 1))
            ratio = lambda n: ((n + 1) / n) ** 2 * np.exp(-a * (2 * n + 1))
        else:
            term = lambda n: np.exp(-a * (n * n - 1))
            ratio = lambda n: np.exp(-a * (2 * n + 1))
        return certified_sum(term, ratio)
