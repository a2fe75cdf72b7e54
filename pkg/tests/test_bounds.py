from __future__ import annotations

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from friable import bounds
from friable.exceptions import DomainError


def test_fan_bound_examples():
    rh = bounds.fan_bound("rh", 10**6)
    assert rh.value == pytest.approx(1.66 * math.log(1e6) ** 2 / 1e3, rel=1e-14)
    assert rh.value == pytest.approx(0.3169, abs=1e-4) and not rh.trivial
    assert bounds.fan_bound("unconditional", 10**6).trivial
    r3 = bounds.fan_bound("rh", 3)
    assert r3.value == pytest.approx(1.66 * math.log(3) ** 2 / math.sqrt(3), rel=1e-14)
    assert r3.trivial
    u = bounds.fan_bound("unconditional", 1000)
    ly = math.log(1000)
    assert u.value == pytest.approx(15.8 * ly ** 0.25 / math.exp(math.sqrt(ly / 6.315)), rel=1e-14)


def test_fan_bound_domain():
    with pytest.raises(DomainError):
        bounds.fan_bound("rh", 2)
    with pytest.raises(DomainError):
        bounds.fan_bound("unconditional", 1)
    with pytest.raises(DomainError):
        bounds.fan_bound("weird", 10)


def test_unconditional_is_trivial_at_desk_scale():
    y, val = bounds.unconditional_bound_minimum(10**6)
    assert val >= 1.0
    assert val == pytest.approx(bounds.fan_bound("unconditional", y).value, rel=1e-14)


@given(x=st.floats(1, 1e5, allow_nan=False), y=st.integers(2, 2000))
def test_trivial_bounds_hold(ctx, x, y):
    assert bounds.trivial_bounds_check(x, y, ctx).all_hold


def test_audit_rows_record_margin(ctx):
    rows = bounds.audit_delta("rh", 10**4, [10.0, 1e4, 5e4], ctx)
    for r in rows:
        assert r.margin == pytest.approx(r.bound - r.observed)
        assert r.trivial == (r.bound >= 1)
    trivial = bounds.audit_delta("trivial", 7, [1.0, 10.5, 1e3], ctx)
    assert all(r.holds() for r in trivial)


def test_rh_audit_observation(ctx):
    xs = bounds.audit_grid(10**5, 10, 1e6, 25)
    rows = bounds.audit_delta("rh", 10**5, xs, ctx)
    assert min(r.margin for r in rows) >= 0


@pytest.mark.parametrize("starred", [False, True])
def test_corexact_propagation(ctx, starred):
    rep = bounds.propagate_corexact(None, 3000, 7, starred, ctx)
    assert rep.self_calibrated and rep.status == "pass"
    assert rep.max_hypothesis_ratio == pytest.approx(1.0)


def test_corexact2_propagation(ctx):
    rep = bounds.propagate_corexact2(None, 3000, 7, ctx)
    assert rep.status == "pass"
    assert rep.f == pytest.approx(rep.extra["max_delta_over_rho"])


def test_undersized_hypothesis_is_flagged(ctx):
    rep = bounds.propagate_corexact2(1e-6, 3000, 7, ctx)
    assert rep.status == "hypothesis-violated"
    rep = bounds.propagate_corexact(1e-9, 3000, 7, False, ctx)
    assert rep.status == "hypothesis-violated"


def test_implication_grid_contents():
    g = bounds.implication_grid(100, 7)
    vals = set(g.tolist())
    assert {1.0, 7.0, 49.0, 99.5, 100.0}.issubset(vals)
    assert 50.0 - bounds.LEFT_LIMIT in vals
    with pytest.raises(DomainError):
        bounds.implication_grid(0.5, 7)
