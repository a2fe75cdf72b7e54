from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from friable.arith import EXP_NEG_GAMMA
from friable.exceptions import DomainError
from friable.special import (build_dickman, build_exp_convolution,
                             dickman_buchstab_convolution_residual, u_omega_prime)

mpmath = pytest.importorskip("mpmath")
mpmath.mp.dps = 30


@pytest.fixture(scope="module")
def tables(ctx):
    return ctx.tables


def rho_on_2_3(u: float) -> float:
    u = mpmath.mpf(u)
    return float(1 - mpmath.log(u) + mpmath.quad(lambda t: mpmath.log(t - 1) / t, [2, u]))


def test_closed_form_oracles(tables):
    assert abs(tables.rho(2.0) - (1 - math.log(2))) <= 1e-12
    assert abs(tables.rho_prime(2.0) + 0.5) <= 1e-12
    assert abs(tables.omega(2.5) - (1 + math.log(1.5)) / 2.5) <= 1e-12
    assert tables.rho_prime(1.0) == -1.0
    assert tables.rho(0.5) == 1.0 and tables.rho(1.0) == 1.0
    assert tables.omega(1.5) == pytest.approx(1 / 1.5, abs=1e-15)
    assert tables.omega(0.5) == 0.0


@pytest.mark.parametrize("u", np.linspace(2.0, 3.0, 11).tolist())
def test_rho_against_mpmath_on_2_3(tables, u):
    assert abs(tables.rho(u) - rho_on_2_3(u)) <= 1e-13


def test_rho_reference_values(tables):
    # published high-precision values
    assert tables.rho(5.0) == pytest.approx(3.5472470045434e-4, rel=1e-11)
    assert tables.rho(10.0) == pytest.approx(2.77017183772596e-11, rel=1e-11)


def test_omega_tends_to_exp_minus_gamma(tables):
    assert abs(tables.omega(12.0) - EXP_NEG_GAMMA) < 1e-12
    assert abs(tables.omega_minus_egamma(12.0)) < 1e-12
    assert tables.omega_minus_egamma(0.3) == -EXP_NEG_GAMMA


def test_table_accuracy_is_certified(tables):
    assert tables.dickman.accuracy_estimate <= 1e-12
    assert tables.buchstab.accuracy_estimate <= 1e-12


@given(u=st.floats(1.01, 40, allow_nan=False))
def test_dickman_delay_equation(tables, u):
    h = 1e-6
    if abs(u - round(u)) < 2 * h:
        u += 0.01
    d = (tables.rho(u + h) - tables.rho(u - h)) / (2 * h)
    assert abs(u * d + tables.rho(u - 1)) <= 1e-8 * max(1.0, tables.rho(u - 1))


@given(u=st.floats(2.01, 40, allow_nan=False))
def test_buchstab_delay_equation(tables, u):
    if abs(u - round(u)) < 1e-3:
        u += 0.01
    lhs = float(u_omega_prime(u, tables.buchstab))
    assert abs(lhs - tables.omega(u - 1)) <= 1e-10


@given(a=st.floats(0, 45, allow_nan=False), b=st.floats(0, 45, allow_nan=False))
def test_rho_monotone_and_bounded(tables, a, b):
    lo, hi = sorted((a, b))
    assert 0 < tables.rho(hi) <= tables.rho(lo) <= 1


@given(u=st.floats(1, 45, allow_nan=False))
def test_omega_range(tables, u):
    assert 0.5 - 1e-15 <= tables.omega(u) <= 1 + 1e-15


@pytest.mark.parametrize("u", [0.0, 0.5, 1.0, 1.7, 2.0, 3.3, 7.9, 15.0, 20.0])
def test_convolution_identity(tables, u):
    assert abs(dickman_buchstab_convolution_residual(u, tables)) <= 1e-12


def test_vectorised_matches_scalar(tables):
    us = np.linspace(0, 30, 301)
    vec = tables.rho(us)
    assert np.array_equal(vec, np.array([tables.rho(float(u)) for u in us]))


@pytest.mark.parametrize("kernel,u0", [("omega", 1.0), ("rho_prime", 1.0), ("rho", 0.0)])
@pytest.mark.parametrize("y", [3, 29])
def test_exp_convolution_against_mpmath(tables, kernel, u0, y):
    phi = {"omega": tables.omega, "rho_prime": tables.rho_prime, "rho": tables.rho}[kernel]
    tab = build_exp_convolution(kernel, y, tables, u_max=8.0)
    for u in (1.3, 2.0, 2.75, 4.5, 7.9):
        pts = [u0] + [k for k in range(int(u0) + 1, int(u) + 1)] + [u]
        ref = mpmath.quad(lambda w: phi(float(w)) * mpmath.power(y, -(u - w)), pts)
        assert abs(tab(u) - float(ref)) <= 1e-13
        anti = mpmath.quad(lambda s: tab(float(s)), [u0] + pts[1:-1] + [u])
        assert abs(tab.integral(u) - float(anti)) <= 1e-12
    assert tab(u0 - 0.5) == 0.0 if u0 > 0 else True


def test_domain_errors(tables):
    with pytest.raises(DomainError):
        tables.rho(60.0)
    with pytest.raises(DomainError):
        build_dickman(1.5)
    with pytest.raises(DomainError):
        dickman_buchstab_convolution_residual(-1.0, tables)
