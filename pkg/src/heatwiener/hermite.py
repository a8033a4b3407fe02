"""L2-normalized Hermite functions.

psi_nu(u) = F_nu(u) / (pi^{1/4} 2^{nu/2} sqrt(nu!)), where
F_nu(u) = (-1)^nu e^{u^2/2} d^nu/du^nu e^{-u^2}, evaluated with the three-term
recurrence

    psi_{nu+1} = sqrt(2/(nu+1)) u psi_nu - sqrt(nu/(nu+1)) psi_{nu-1}.

The Gaussian seed e^{-u^2/2} underflows long before high orders reach their
oscillatory region, so the recurrence runs on mantissas with a separate
per-point log scale.
"""

from __future__ import annotations

import math

import numpy as np

from .config import DEFAULT
from .errors import OrderCapExceeded

_RESCALE_AT = 1e150
_LOG_RESCALE = math.log(_RESCALE_AT)


def hermite_table(max_order: int, u, cap: int = DEFAULT.hermite_order_cap) -> np.ndarray:
    """psi_0 .. psi_max_order at every u; result has shape (max_order + 1, *u.shape)."""
    if max_order < 0:
        raise ValueError("order must be >= 0")
    if max_order > cap:
        raise OrderCapExceeded(f"Hermite order {max_order} exceeds cap {cap}")
    u = np.asarray(u, dtype=float)
    out = np.empty((max_order + 1,) + u.shape)
    log_scale = -0.5 * u * u
    prev = np.zeros_like(u)
    cur = np.full_like(u, math.pi**-0.25)
    out[0] = cur * np.exp(log_scale)
    for nu in range(max_order):
        nxt = math.sqrt(2.0 / (nu + 1)) * u * cur - math.sqrt(nu / (nu + 1.0)) * prev
        prev, cur = cur, nxt
        big = np.abs(cur) > _RESCALE_AT
        if big.any():
            prev = np.where(big, prev / _RESCALE_AT, prev)
            cur = np.where(big, cur / _RESCALE_AT, cur)
            log_scale = np.where(big, log_scale + _LOG_RESCALE, log_scale)
        out[nu + 1] = cur * np.exp(np.minimum(log_scale, 700.0))
    return out


def hermite_psi(nu: int, u, cap: int = DEFAULT.hermite_order_cap):
    """Normalized Hermite function psi_nu(u)."""
    val = hermite_table(nu, u, cap)[nu]
    return val if val.ndim else float(val)


def envelope_radius(max_order: int, envelope: float = DEFAULT.hermite_envelope) -> float:
    """Radius U beyond which |psi_nu(u)| < envelope for every nu <= max_order.

    Past the turning point a = sqrt(2 nu + 1) the function decays like
    exp(-int_a^u sqrt(s^2 - a^2) ds); U solves that exponent = log(1/envelope) + 4.
    """
    a = math.sqrt(2 * max_order + 1)
    target = math.log(1.0 / envelope) + 4.0

    def exponent(x):
        r = math.sqrt(x * x - a * a)
        return 0.5 * (x * r - a * a * math.log((x + r) / a))

    lo, hi = a, a + 1.0
    while exponent(hi) < target:
        hi = a + 2 * (hi - a)
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if exponent(mid) < target else (lo, mid)
    return hi
