"""Explicit bounds for Delta and the audits that compare them with computed values.

Three kinds of statement are audited:

* closed-form bounds on |Delta(x, y)|/x, one unconditional and one
  conditional on the Riemann hypothesis (``fan_bound``); the conditional
  audit is an observation, not a proof;
* implications "|Q| <= x f  on [1, X]  =>  |R| <= x f/Pi(y), |Delta| <= 2 x f/Pi(y)"
  (also with Q*, R*) and "|Delta| <= x f rho(u)  =>  |R*| <= x f, |Q*| <= x f/Pi(y)";
  f defaults to the smallest value the hypothesis allows on the grid;
* the elementary facts 0 <= Psi <= floor(x) and -{x} <= Lambda <= floor(x).

Comparisons allow a relative slack of ``REL_SLACK`` for rounding: in the
regime x <= y several of the implications hold with equality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import error_terms as et
from .approx import lambda_approx
from .context import Context, default_context
from .exceptions import DomainError, FriableError
from .identities import batch_evaluator

REL_SLACK = 1e-12
LEFT_LIMIT = 1e-8          # offset used to sample x just below an integer


class TrivialBoundViolation(FriableError):
    """|Delta(x, y)| > x at an audited point (impossible for correct Psi and Lambda)."""


# ---------------------------------------------------------------------------
# Explicit bound formulas
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FanBound:
    kind: str
    y: int
    value: float         # bound on |Delta(x, y)|/x

    @property
    def trivial(self) -> bool:
        return self.value >= 1.0


def _fan_values(kind: str, y: np.ndarray) -> np.ndarray:
    log_y = np.log(y)
    if kind == "unconditional":
        return 15.8 * log_y ** 0.25 / np.exp(np.sqrt(log_y / 6.315))
    return 1.66 * log_y ** 2 / np.sqrt(y)


def fan_bound(kind: str, y: int) -> FanBound:
    if kind not in ("unconditional", "rh"):
        raise DomainError(f"unknown bound kind {kind!r}")
    if int(y) != y:
        raise DomainError(f"y must be an integer, got {y!r}")
    if y < (2 if kind == "unconditional" else 3):
        raise DomainError(f"{kind} bound needs y >= {2 if kind == 'unconditional' else 3}")
    return FanBound(kind, int(y), float(_fan_values(kind, np.array([float(y)]))[0]))


def unconditional_bound_minimum(y_max: int) -> tuple[int, float]:
    """(argmin, min) of the unconditional bound over integers 2 <= y <= y_max."""
    ys = np.arange(2, int(y_max) + 1, dtype=float)
    vals = _fan_values("unconditional", ys)
    i = int(np.argmin(vals))
    return int(ys[i]), float(vals[i])


# ---------------------------------------------------------------------------
# Audit rows
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundAuditRow:
    x: float
    y: int
    observed: float
    bound: float
    margin: float
    trivial: bool
    quantity: str = "delta"

    @classmethod
    def make(cls, x, y, observed, bound, quantity="delta") -> "BoundAuditRow":
        return cls(float(x), int(y), float(observed), float(bound), float(bound - observed),
                   bool(bound >= 1.0), quantity)

    def holds(self) -> bool:
        return self.margin >= -REL_SLACK * max(1.0, abs(self.bound))


def audit_grid(y: int, x_lo: float, x_hi: float, n: int) -> list[float]:
    """Log-spaced x plus integer and half-integer points around y and y^2."""
    xs = set(np.geomspace(x_lo, x_hi, n).tolist()) if n > 1 else {float(x_lo)}
    for c in (y, y * y):
        xs.update(c + d for d in (-1.0, -0.5, -LEFT_LIMIT, 0.0, 0.5, 1.0))
    return sorted(v for v in xs if x_lo <= v <= x_hi)


def _delta_over_x(x: float, y: int, ctx: Context) -> float:
    d = et.delta(x, y, ctx)
    obs = abs(d) / x
    if obs > 1.0 + REL_SLACK:
        raise TrivialBoundViolation(f"|Delta({x}, {y})| = {abs(d)} exceeds x")
    return obs


def audit_delta(kind: str, y: int, x_samples, ctx: Context | None = None) -> list[BoundAuditRow]:
    """|Delta(x, y)|/x against a bound; ``kind='trivial'`` uses the bound 1.

    The check |Delta| <= x is enforced at every point (raises
    :class:`TrivialBoundViolation`); comparisons with the other bounds are
    only recorded.
    """
    ctx = ctx or default_context()
    bound = 1.0 if kind == "trivial" else fan_bound(kind, y).value
    rows = []
    for x in x_samples:
        if x < 1:
            raise DomainError(f"audit needs x >= 1, got {x}")
        rows.append(BoundAuditRow.make(x, y, _delta_over_x(float(x), int(y), ctx), bound))
    return rows


@dataclass(frozen=True)
class TrivialBoundsFlags:
    x: float
    y: int
    psi: int
    lam: float
    psi_nonnegative: bool
    psi_at_most_floor: bool
    lambda_at_least_minus_frac: bool
    lambda_at_most_floor: bool

    @property
    def all_hold(self) -> bool:
        return (self.psi_nonnegative and self.psi_at_most_floor
                and self.lambda_at_least_minus_frac and self.lambda_at_most_floor)


def trivial_bounds_check(x: float, y: int, ctx: Context | None = None) -> TrivialBoundsFlags:
    ctx = ctx or default_context()
    if x < 1:
        raise DomainError(f"x must be >= 1, got {x}")
    psi = ctx.psi(x, y)
    lam = lambda_approx(x, y, ctx)
    ctx.monitor.record(x, y, psi, lam)
    fl = math.floor(x)
    slack = ctx.monitor.rel_tol * x
    return TrivialBoundsFlags(float(x), int(y), psi, lam, psi >= 0, psi <= fl,
                              lam >= -(x - fl) - slack, lam <= fl + slack)


# ---------------------------------------------------------------------------
# Implication audits
# ---------------------------------------------------------------------------

@dataclass
class PropagationReport:
    """Hypothesis rows, conclusion rows and the verdict of one implication audit.

    ``status`` is ``'hypothesis-violated'`` when f is too small for the
    hypothesis on the grid (conclusions are then not judged), otherwise
    ``'pass'`` or ``'fail'`` according to the conclusion rows.
    """

    kind: str
    y: int
    X: float
    f: float
    self_calibrated: bool
    hypothesis: list
    conclusions: list
    status: str
    min_margin: float
    max_hypothesis_ratio: float
    extra: dict = field(default_factory=dict)

    @property
    def rows(self) -> list:
        return self.hypothesis + self.conclusions


def implication_grid(X: float, y: int, dense_limit: int = 20000) -> np.ndarray:
    """Points of [1, X]: every integer, its left limit and the half-integers up to
    ``dense_limit``, log-spaced points beyond, and refinements near y and y^2."""
    X = float(X)
    if X < 1:
        raise DomainError("X must be >= 1")
    top = int(min(math.floor(X), dense_limit))
    ks = np.arange(1, top + 1, dtype=float)
    pts = [ks, ks[1:] - LEFT_LIMIT, ks + 0.5]
    if X > dense_limit:
        pts.append(np.geomspace(dense_limit, X, 2000))
        for c in (y, y * y):
            pts.append(c + np.array([-1.0, -0.5, -LEFT_LIMIT, 0.0, 0.5, 1.0]))
    pts.append(np.array([X]))
    xs = np.unique(np.concatenate(pts))
    return xs[(xs >= 1.0) & (xs <= X)]


def _q_over_x(xs: np.ndarray, y: int, ctx: Context, starred: bool) -> np.ndarray:
    mert = ctx.mertens(y)
    mu = ctx.mu_table(y)(np.log(xs) / math.log(y))
    phi = ctx.rough(y, xs.max()).counts[np.floor(xs).astype(np.int64)]
    slope = 0.0 if starred else mert.q_slope
    return (1.0 - phi) / xs + slope + mu


def _rows(xs, y, observed, bound, quantity):
    return [BoundAuditRow.make(x, y, o, bound, quantity)
            for x, o in zip(xs.tolist(), np.asarray(observed).tolist())]


def _finish(kind, y, X, f, calibrated, hyp, concl, ratio, **extra) -> PropagationReport:
    if not all(r.holds() for r in hyp):
        status = "hypothesis-violated"
    else:
        status = "pass" if all(r.holds() for r in concl) else "fail"
    min_margin = min((r.margin for r in concl), default=float("inf"))
    return PropagationReport(kind, y, X, f, calibrated, hyp, concl, status, min_margin, ratio,
                             extra)


def propagate_corexact(f: float | None, X: float, y: int, starred: bool = False,
                       ctx: Context | None = None) -> PropagationReport:
    """|Q| <= x f on [1, X]  =>  |R| <= x f/Pi(y) on (0, X], |Delta| <= 2 x f/Pi(y) on [1, X].

    ``starred`` swaps (Q, R) for (Q*, R*).  ``f=None`` calibrates f to the
    largest |Q|/x on the grid.
    """
    ctx = ctx or default_context()
    xs = implication_grid(X, y)
    q = np.abs(_q_over_x(xs, y, ctx, starred))
    calibrated = f is None
    f = float(q.max()) if calibrated else float(f)
    if f <= 0:
        raise DomainError("f must be positive")
    mert = ctx.mertens(y)
    be = batch_evaluator(ctx, y, float(X))
    hyp = _rows(xs, y, q, f, "q_star" if starred else "q")
    # (0, 1): R = -beta x and R* = 0 in closed form
    below = np.array([0.25, 0.5, 0.75, 1.0 - LEFT_LIMIT])
    if starred:
        r_low = np.zeros_like(below)
        r = np.abs(be.r_star_over_t(xs))
    else:
        r_low = np.abs(np.array([et.r_error(v, y, ctx) for v in below.tolist()]) / below)
        r = np.abs(be.r_over_t(xs))
    d = np.abs(be.delta_over_t(xs))
    if d.max() > 1.0 + REL_SLACK:
        raise TrivialBoundViolation(f"|Delta|/x = {d.max()} exceeds 1 for y = {y}")
    bound_r = f * mert.inv_pi_y
    concl = (_rows(below, y, r_low, bound_r, "r_star" if starred else "r")
             + _rows(xs, y, r, bound_r, "r_star" if starred else "r")
             + _rows(xs, y, d, 2.0 * bound_r, "delta"))
    return _finish("corexact_star" if starred else "corexact", y, X, f, calibrated, hyp, concl,
                   float(q.max() / f), n_points=int(xs.size))


def propagate_corexact2(f: float | None, X: float, y: int,
                        ctx: Context | None = None) -> PropagationReport:
    """|Delta| <= x f rho(u) on [1, X]  =>  |R*| <= x f and |Q*| <= x f/Pi(y) on [1, X].

    ``f=None`` calibrates f to the largest |Delta|/(x rho(u)) on the grid;
    that value is also reported as ``max_delta_over_rho``.
    """
    ctx = ctx or default_context()
    xs = implication_grid(X, y)
    be = batch_evaluator(ctx, y, float(X))
    d = np.abs(be.delta_over_t(xs))
    if d.max() > 1.0 + REL_SLACK:
        raise TrivialBoundViolation(f"|Delta|/x = {d.max()} exceeds 1 for y = {y}")
    rho = ctx.tables.rho(np.log(xs) / math.log(y))
    ratio = d / rho
    calibrated = f is None
    max_ratio = float(ratio.max())
    f = max_ratio if calibrated else float(f)
    if calibrated and f == 0.0:
        f = float(np.finfo(float).tiny)     # Delta = 0 on the whole grid (X <= y)
    if f <= 0:
        raise DomainError("f must be positive")
    mert = ctx.mertens(y)
    hyp = [BoundAuditRow.make(x, y, dv, f * rv, "delta_over_rho")
           for x, dv, rv in zip(xs.tolist(), d.tolist(), rho.tolist())]
    r_star = np.abs(be.r_star_over_t(xs))
    q_star = np.abs(_q_over_x(xs, y, ctx, starred=True))
    concl = _rows(xs, y, r_star, f, "r_star") + _rows(xs, y, q_star, f * mert.inv_pi_y, "q_star")
    return _finish("corexact2", y, X, f, calibrated, hyp, concl, max_ratio / f if f else 0.0,
                   max_delta_over_rho=max_ratio, n_points=int(xs.size))


__all__ = ["FanBound", "BoundAuditRow", "PropagationReport", "TrivialBoundsFlags",
           "TrivialBoundViolation", "fan_bound", "unconditional_bound_minimum", "audit_grid",
           "audit_delta", "trivial_bounds_check", "implication_grid", "propagate_corexact",
           "propagate_corexact2"]
