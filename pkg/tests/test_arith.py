from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import brute_phi, brute_psi
from friable import arith
from friable.exceptions import DomainError, ResourceError


def test_smooth_list_matches_hand_enumeration():
    got = arith.enumerate_smooth(5, 30).values.tolist()
    assert got == [1, 2, 3, 4, 5, 6, 8, 9, 10, 12, 15, 16, 18, 20, 24, 25, 27, 30]


def test_known_values():
    assert arith.psi_exact(30, 5) == 18
    assert arith.psi_exact(100, 5) == 34 == brute_psi(100, 5)
    assert arith.phi_exact(30, 5) == 8
    assert arith.psi_exact(0.5, 5) == 0


@pytest.mark.parametrize("method", ["enumerate", "sieve"])
@given(x=st.floats(0, 3000, allow_nan=False), y=st.integers(2, 200))
def test_psi_against_trial_division(method, x, y):
    assert arith.psi_exact(x, y, method) == brute_psi(x, y)


@given(x=st.floats(0, 2000, allow_nan=False), y=st.integers(2, 200))
def test_phi_against_trial_division(x, y):
    assert arith.phi_exact(x, y) == brute_phi(x, y)


@given(x=st.floats(1, 5000, allow_nan=False), y=st.integers(2, 300))
def test_psi_monotone_and_trivially_bounded(x, y):
    p = arith.psi_exact(x, y)
    assert 0 <= p <= math.floor(x)
    assert arith.psi_exact(x, y + 1) >= p
    assert arith.psi_exact(x + 1, y) >= p


@pytest.mark.parametrize("y", [2, 5, 13, 101, 1009])
def test_psi_tables_agree(y):
    a = arith.psi_table(2 * 10**5, y, "enumerate")
    b = arith.psi_table(2 * 10**5, y, "sieve")
    assert np.array_equal(a, b)


def test_psi_equals_floor_for_large_y():
    assert arith.psi_exact(97.5, 97) == 97
    assert arith.psi_exact(97.5, 101, "sieve") == 97


def test_mobius_values_ride_along():
    enum = arith.enumerate_smooth(7, 60)
    ref = {1: 1, 2: -1, 4: 0, 6: 1, 12: 0, 30: -1, 35: 1, 42: -1, 60: 0}
    lookup = dict(zip(enum.values.tolist(), enum.mobius.tolist()))
    for n, mu in ref.items():
        assert lookup[n] == mu


def test_lpf_sieve():
    lpf = arith.largest_prime_factor_sieve(100)
    for n in range(2, 101):
        ps = [p for p in range(2, n + 1) if n % p == 0 and all(p % q for q in range(2, p))]
        assert lpf[n] == max(ps)


def test_mertens_product_against_mpmath():
    mpmath = pytest.importorskip("mpmath")
    mpmath.mp.dps = 40
    for y in (2, 10, 101, 10**4):
        ps = [p for p in range(2, y + 1) if all(p % q for q in range(2, math.isqrt(p) + 1))]
        ref = mpmath.fprod([1 - mpmath.mpf(1) / p for p in ps])
        m = arith.mertens_data(y)
        assert abs(m.pi_y - float(ref)) <= 1e-15 * float(ref)
        assert abs(m.inv_pi_y * m.pi_y - 1) <= 1e-15
        assert m.beta_y == pytest.approx(m.alpha_y - 1, abs=0)


def test_inverse_pi_is_smooth_harmonic_sum():
    # sum over all 5-smooth n of 1/n = prod p/(p-1) = 2 * 3/2 * 5/4
    h = arith.smooth_harmonic_below(5, 1e15)
    assert h == pytest.approx(3.75, rel=1e-12)
    assert arith.mertens_data(5).inv_pi_y == pytest.approx(3.75, rel=1e-15)


@pytest.mark.parametrize("y", [2, 3, 7, 31])
def test_factorization_identity_point(y):
    for x in (1, 2.5, 17, 999.9, 5000):
        assert arith.factorization_identity_residual(x, y) == 0


def test_domain_errors():
    with pytest.raises(DomainError):
        arith.psi_exact(10, 1)
    with pytest.raises(DomainError):
        arith.psi_exact(10, 2.5)
    with pytest.raises(DomainError):
        arith.psi_exact(-1, 5)
    with pytest.raises(DomainError):
        arith.psi_exact(10, 5, method="bogus")
    with pytest.raises(DomainError):
        arith.phi_exact(10, 0)


def test_resource_cap():
    with pytest.raises(ResourceError):
        arith.enumerate_smooth(97, 10**9, cap=1000)
    with pytest.raises(ResourceError):
        arith.psi_exact(1e12, 5)
