import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import eval_hermite

from heatwiener.errors import OrderCapExceeded
from heatwiener.hermite import envelope_radius, hermite_psi, hermite_table


def psi_from_derivatives(nu):
    """psi_nu from F_nu(t) = (-1)^nu e^{t^2/2} d^nu/dt^nu e^{-t^2}, by symbolic differentiation."""
    t = sp.symbols("t", real=True)
    F = (-1) ** nu * sp.exp(t**2 / 2) * sp.diff(sp.exp(-(t**2)), t, nu)
    norm = sp.pi ** sp.Rational(1, 4) * sp.sqrt(2**nu * sp.factorial(nu))
    return sp.lambdify(t, sp.simplify(F / norm), "math")


def test_psi0_at_zero():
    assert hermite_psi(0, 0.0) == pytest.approx(math.pi**-0.25, rel=1e-15)


def test_psi1_odd():
    assert hermite_psi(1, 0.0) == 0.0
    assert hermite_psi(1, -0.7) == pytest.approx(-hermite_psi(1, 0.7), abs=1e-16)


@pytest.mark.parametrize("u", [0.0, 0.5, 1.0])
def test_psi2_symbolic(u):
    assert hermite_psi(2, u) == pytest.approx(psi_from_derivatives(2)(u), abs=1e-15)


@pytest.mark.parametrize("nu", [3, 5])
def test_higher_orders_symbolic(nu):
    f = psi_from_derivatives(nu)
    for u in (-1.3, 0.2, 2.5):
        assert hermite_psi(nu, u) == pytest.approx(f(u), abs=1e-14)


def test_against_physicists_polynomials():
    u = np.linspace(-6, 6, 41)
    table = hermite_table(40, u)
    for nu in range(41):
        ref = eval_hermite(nu, u) * np.exp(-u * u / 2) / math.sqrt(2**nu * math.factorial(nu) * math.sqrt(math.pi))
        np.testing.assert_allclose(table[nu], ref, atol=1e-13, rtol=1e-11)


@pytest.mark.parametrize("nu", [0, 10, 200, 1500])
def test_normalization_high_order(nu):
    U = envelope_radius(nu)
    u = np.linspace(-U, U, 40001)
    psi = hermite_table(nu, u)
    du = u[1] - u[0]
    assert np.sum(psi[nu] ** 2) * du == pytest.approx(1.0, abs=1e-9)
    if nu:
        assert abs(np.sum(psi[nu] * psi[nu - 1]) * du) < 1e-9


@pytest.mark.parametrize("H", [0, 5, 64, 800, 4000])
def test_envelope_radius_bounds_every_order(H):
    U = envelope_radius(H)
    u = np.array([U, U + 1.0, -U, 2 * U])
    assert np.all(np.abs(hermite_table(H, u)) < 1e-14)


def test_order_cap():
    with pytest.raises(OrderCapExceeded):
        hermite_psi(65, 0.1, cap=64)
    with pytest.raises(ValueError):
        hermite_table(-1, 0.0)


@given(st.integers(0, 80), st.floats(-12, 12))
def test_parity(nu, u):
    a, b = hermite_psi(nu, u), hermite_psi(nu, -u)
    assert a == pytest.approx((-1) ** nu * b, abs=1e-15)
