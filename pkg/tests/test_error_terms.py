from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import brute_phi, brute_psi
from friable import approx, arith
from friable import error_terms as et
from friable.exceptions import DomainError


def direct_q(z: float, y: int, ctx) -> float:
    return approx.v_approx(z, y, ctx) - (brute_phi(z, y) if z >= 1 else 0)


def test_delta_at_100_5(ctx):
    assert et.psi(100, 5, ctx) == 34
    assert et.delta(100, 5, ctx) == pytest.approx(34 - approx.lambda_approx(100, 5, ctx), abs=0)


def test_r_against_long_direct_sum(ctx):
    # every term Q(100/n) over 5-smooth n <= 1e15; the omitted tail is ~1e-13 * x
    x, y = 100.0, 5
    ns = arith.enumerate_smooth(y, 1e15).values.tolist()
    ref = math.fsum(direct_q(x / n, y, ctx) for n in ns)
    assert abs(et.r_error(x, y, ctx) - ref) <= 1e-8 * x


@pytest.mark.parametrize("x,y", [(100.0, 5), (777.5, 7), (3000.0, 13)])
def test_r_star_against_direct_finite_sum(ctx, x, y):
    ns = arith.enumerate_smooth(y, x).values.tolist()
    ref = math.fsum(approx.v_star_approx(x / n, y, ctx) - (brute_phi(x / n, y) if x / n >= 1 else 0)
                    for n in ns)
    assert abs(et.r_star_error(x, y, ctx) - ref) <= 1e-12 * x


@given(x=st.floats(1, 5000, allow_nan=False), y=st.integers(2, 300))
def test_phi_and_psi_match_brute_force(ctx, x, y):
    assert et.phi(x, y, ctx) == brute_phi(x, y)
    assert et.psi(x, y, ctx) == brute_psi(x, y)


@given(x=st.floats(1, 10**4, allow_nan=False), y=st.sampled_from([7, 101, 9973]))
def test_closed_form_regime(ctx, x, y):
    if x > y:
        x = 1 + (x - 1) % (y - 1)
    tol = 1e-12 * x
    assert abs(et.delta(x, y, ctx)) <= tol
    assert abs(et.q_star_error(x, y, ctx)) <= tol
    assert abs(et.r_star_error(x, y, ctx)) <= tol
    assert abs(et.q_error(x, y, ctx) - et.closed_form_q(x, y, ctx)) <= tol
    assert abs(et.r_error(x, y, ctx) - et.closed_form_r(x, y, ctx)) <= tol
    assert et.closed_form_r(x, y, ctx) == pytest.approx(-ctx.mertens(y).beta_y * x, rel=1e-12)


@pytest.mark.parametrize("x", [10.0, 50.0, 100.0, 1000.0, 10**4])
@pytest.mark.parametrize("y", [2, 5, 13])
@pytest.mark.parametrize("starred", [False, True])
def test_mobius_inversion(ctx, x, y, starred):
    assert abs(et.mobius_inversion_residual(x, y, ctx, starred=starred)) <= 1e-8 * x


@given(x=st.floats(1, 3e4, allow_nan=False), y=st.sampled_from([2, 5, 13, 101]))
def test_r_star_equals_r_plus_beta_x(ctx, x, y):
    a = et.r_star_error(x, y, ctx)
    b = et.r_star_via_rreq(x, y, ctx)
    assert abs(a - b) <= 1e-10 * x


@pytest.mark.parametrize("y", [5, 13, 101])
def test_rough_excess_equals_psi_minus_floor(ctx, y):
    k_max = 20000
    excess = et.rough_excess(y, k_max, ctx)
    psi = arith.psi_table(k_max, y)
    assert np.array_equal(excess, psi - np.arange(k_max + 1))


@pytest.mark.parametrize("y", [5, 31])
def test_batch_evaluator_matches_point_functions(ctx, y):
    t_max = 4000.0
    be = et.BatchEvaluator(y, t_max, ctx)
    ts = np.array([1.0, 2.5, y - 0.5, y + 0.0, y + 0.5, 99.9, 500.0, 1234.5, 3999.0])
    r = be.r_over_t(ts) * ts
    rs = be.r_star_over_t(ts) * ts
    d = be.delta_over_t(ts) * ts
    for i, t in enumerate(ts.tolist()):
        assert r[i] == pytest.approx(et.r_error(t, y, ctx), abs=1e-11 * t)
        assert rs[i] == pytest.approx(et.r_star_error(t, y, ctx), abs=1e-11 * t)
        assert d[i] == pytest.approx(et.delta(t, y, ctx), abs=1e-11 * t)
    dq = be.delta_over_t(ts[:4], method="quadrature") * ts[:4]
    assert np.allclose(dq, d[:4], atol=1e-11 * ts.max(), rtol=0)


def test_domain_errors(ctx):
    with pytest.raises(DomainError):
        et.delta(0.5, 7, ctx)
    with pytest.raises(DomainError):
        et.psi(10, 1, ctx)
    with pytest.raises(DomainError):
        et.r_error(10, 0, ctx)
    be = et.BatchEvaluator(7, 100.0, ctx)
    with pytest.raises(DomainError):
        be.r_over_t(np.array([200.0]))
