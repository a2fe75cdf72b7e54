from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from friable import approx
from friable.arith import EXP_GAMMA
from friable.exceptions import DomainError

mpmath = pytest.importorskip("mpmath")
mpmath.mp.dps = 30


def test_lambda_at_2_5_against_closed_integral(ctx):
    # y = 2: u - 1 = log2(1.25), floor(2^v) = 1 on [0, u-1], rho'(s) = -1/s on [1, 2]
    x, y = 2.5, 2
    u = math.log(x) / math.log(y)
    integral = -mpmath.quad(lambda v: (1 - mpmath.power(2, -v)) / (u - v), [0, u - 1])
    ref = x * float(1 - mpmath.log(u)) - 0.5 - x * float(integral)
    assert abs(approx.lambda_approx(x, y, ctx) - ref) <= 1e-9 * x


@pytest.mark.parametrize("y", [3, 7, 101])
def test_lambda_at_2_5_is_floor_for_larger_y(ctx, y):
    assert approx.lambda_approx(2.5, y, ctx) == pytest.approx(2.0, abs=1e-14)


@pytest.mark.parametrize("y", [3, 13, 101])
def test_mu_at_2_against_closed_integral(ctx, y):
    ref = mpmath.quad(lambda v: mpmath.power(y, -v) / (2 - v), [0, 1])
    assert abs(approx.mu_y(2.0, y, ctx.tables) - float(ref)) <= 1e-14
    assert abs(ctx.mu_table(y)(2.0) - float(ref)) <= 1e-14


def dense_lambda(x: float, y: int, tables, nodes: int = 10**6) -> float:
    u = math.log(x) / math.log(y)
    hi = u - 1.0
    h = hi / nodes
    v = (np.arange(nodes) + 0.5) * h
    yv = np.exp(v * math.log(y))
    f = tables.rho_prime(u - v) * (yv - np.floor(yv)) / yv
    return x * tables.rho(u) - (x - math.floor(x)) - x * h * f.sum()


@pytest.mark.parametrize("x,y", [(300.5, 7), (1000.0, 5), (5000.25, 31)])
def test_lambda_against_dense_riemann_sum(ctx, x, y):
    ref = dense_lambda(x, y, ctx.tables)
    assert abs(approx.lambda_approx(x, y, ctx) - ref) <= 1e-6 * x


@pytest.mark.parametrize("y", [2, 7, 97])
def test_summed_lambda_matches_quadrature(ctx, y):
    xs = np.array([1.0, 2.5, 50.0, 333.3, 1234.5, 5000.0])
    summed = approx.lambda_kernel_sum(xs, y, ctx)
    direct = np.array([approx.lambda_approx(x, y, ctx) for x in xs.tolist()])
    assert np.all(np.abs(summed - direct) <= 1e-12 * xs)


@given(x=st.floats(1, 20000, allow_nan=False), y=st.integers(2, 500))
def test_lambda_trivial_bounds(ctx, x, y):
    lam = approx.lambda_approx(x, y, ctx)
    fl = math.floor(x)
    assert -(x - fl) - 1e-9 * x <= lam <= fl + 1e-9 * x


@given(x=st.floats(1, 1e4, allow_nan=False), y=st.integers(2, 10**4))
def test_lambda_is_floor_when_x_at_most_y(ctx, x, y):
    if x > y:
        return
    assert abs(approx.lambda_approx(x, y, ctx) - math.floor(x)) <= 1e-12 * x


@pytest.mark.parametrize("u", [0.5, 1.5, 2.5, 4.0])
@pytest.mark.parametrize("y", [3, 13, 101])
def test_mu_differential_identity(ctx, u, y):
    assert abs(approx.mu_ode_residual(u, y, ctx.tables)) <= 1e-7


def test_mu_table_matches_quadrature(ctx):
    for y in (2, 13, 997):
        tab = ctx.mu_table(y)
        for u in (0.3, 1.0, 1.25, 2.0, 3.7, 9.9, 25.0):
            assert abs(tab(u) - approx.mu_y(u, y, ctx.tables)) <= 1e-14


@given(x=st.floats(0.01, 1e6, allow_nan=False), y=st.integers(2, 1000))
def test_v_w_relations(ctx, x, y):
    m = ctx.mertens(y)
    v, vs, w = approx.v_approx(x, y, ctx), approx.v_star_approx(x, y, ctx), approx.w_approx(x, y, ctx)
    assert v - vs == pytest.approx(x * m.q_slope, rel=1e-9, abs=1e-9 * x)
    mu = ctx.mu_table(y)(math.log(x) / math.log(y))
    assert w == pytest.approx(x * mu * m.pi_y * EXP_GAMMA * math.log(y), rel=1e-12, abs=1e-300)


def test_v_star_below_y_is_indicator(ctx):
    assert approx.v_star_approx(0.5, 7, ctx) == 0.0
    assert approx.v_star_approx(5.0, 7, ctx) == 1.0


def test_domain_errors(ctx):
    with pytest.raises(DomainError):
        approx.lambda_approx(0.5, 7, ctx)
    with pytest.raises(DomainError):
        approx.lambda_approx(10, 1, ctx)
    with pytest.raises(DomainError):
        approx.v_approx(-1, 7, ctx)
    with pytest.raises(DomainError):
        approx.mu_ode_residual(1.0, 7, ctx.tables)
