"""Numerical verification of the exact identities tying Delta, R, R*, Psi and mu_y.

With u = log x/log y and r(v) = R(y^v)/y^v, r*(v) = R*(y^v)/y^v,
d(v) = Delta(y^v)/y^v, the checked identities are

    thm1eq1       Delta(x) = R(x) + x int_{-inf}^u r(v) rho'(u-v) dv
    eqvar2        Delta(x) = beta x rho(u) + R(x) + x int_0^u r(v) rho'(u-v) dv
    thm1eq1_star  Delta(x) = R*(x) + x int_0^u r*(v) rho'(u-v) dv
    thm1eq2       R(x)  = Delta(x) + x int_0^inf d(v) (omega(u-v) - e^{-gamma}) dv
    thm1eq2_star  R*(x) = Delta(x) + x int_0^u d(v) omega(u-v) dv
    lemma_sum     Psi(x) = alpha x - x sum_{n smooth} mu_y(log(x/n)/log y)/n + R(x) - {x}
    lemma_integral
                  Psi(x) = alpha x - x int_1^x Psi(t) omega(log(x/t)/log y)/(t^2 log y) dt
                           + R(x) - {x}
    beta_integral e^{-gamma} int_0^inf d(v) dv = beta

omega is extended by 0 below 1.  r(v) = -beta on v <= 1, so the part of
thm1eq1 over (-inf, 0) equals beta x rho(u); r* and d vanish on v <= 1.
Every integrand jumps only where y^v is an integer; those points, and the
joints of rho'/omega at v = u - j, are passed to the quadrature as
breakpoints.

Where the kernel is constant (omega(u - v) - e^{-gamma} = -e^{-gamma} for
v > u - 1), the integral of d is reduced exactly: with t = y^v,

    int d dv = (1/log y) int (Psi(t) - floor t)/t^2 dt
               - sum_n (1/n) [F(v_b - log n/log y) - F(v_a - log n/log y)],

F being the antiderivative of the summed-Lambda kernel.  The remainder
beyond a cap T has the closed form

    int_{log T/log y}^inf d dv = (Psi(T)/T + 1/Pi(y) - sum_{smooth n<=T} 1/n)/log y
                                 - e^{gamma} + sum_{n<=T} k_y(log(T/n)/log y)/n,

with k_y the damped convolution of rho.  Truncating there instead of using
the closed form leaves a remainder of order 1e-3 at desk-scale caps, so the
closed form is used and the remainder's size is reported separately.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.special import digamma

from . import error_terms as et
from .approx import Query, _query
from .arith import EXP_GAMMA, EXP_NEG_GAMMA
from .context import Context, default_context
from .exceptions import DomainError, FriableError, ResourceError
from .grids import Grid, parse_values
from .quadrature import PiecewiseIntegrand, gauss_legendre, integrate_piecewise, interior_points

IDENTITY_IDS = ("thm1eq1", "thm1eq1_star", "thm1eq2", "thm1eq2_star", "eqvar2",
                "lemma_sum", "lemma_integral", "beta_integral")
EXTRA_SUITES = ("factorization", "mobius", "convolution297")
SUITES = IDENTITY_IDS + EXTRA_SUITES

DEFAULT_X_CAP = 1e5           # upper limit y^V of the reduced part of thm1eq2
DEFAULT_BETA_CAP = 1e6        # y^{v_max} for beta_integral
JUMP_RULE_ORDER = 8           # pieces between consecutive jumps are narrow
DEFAULT_U_SPEC = "0:20:201lin"  # u grid of convolution297 when run inside 'all'
_EPS = float(np.finfo(float).eps)


# ---------------------------------------------------------------------------
# Result types
# ---------------------------------------------------------------------------

@dataclass
class IdentityResidual:
    """lhs - rhs at one point; ``budget`` is an additive allowance on the scaled residual."""

    identity_id: str
    x: float
    y: int | None
    lhs: float
    rhs: float
    residual: float
    scaled_residual: float
    budget: float = 0.0
    details: dict = field(default_factory=dict)

    @classmethod
    def make(cls, identity_id: str, x: float, y, lhs: float, rhs: float,
             budget: float = 0.0, scale: float | None = None, **details) -> "IdentityResidual":
        res = lhs - rhs
        return cls(identity_id, x, y, lhs, rhs, res, res / (x if scale is None else scale),
                   budget, details)

    def status(self, tol: float) -> str:
        if self.budget > tol:
            return "inconclusive"
        return "pass" if abs(self.scaled_residual) <= tol else "fail"


@dataclass
class VerificationReport:
    suite: str
    grid: dict
    tol: float
    points: list
    errors: list
    max_scaled_residual: float
    worst: dict | None
    passed: bool
    max_budget: float
    status: str

    def summary(self) -> dict:
        out = {"suite": self.suite, "grid": self.grid, "tol": self.tol,
               "max_scaled_residual": self.max_scaled_residual, "worst": self.worst,
               "pass": self.status == "pass", "status": self.status,
               "n_points": len(self.points), "n_errors": len(self.errors)}
        if self.max_budget > 0:
            out["inconclusive_budget"] = self.max_budget
        return out


# ---------------------------------------------------------------------------
# Shared helpers
# ---------------------------------------------------------------------------

def _prep(x, y, ctx) -> tuple[Query, Context]:
    q = _query(x, y)
    if q.x < 1:
        raise DomainError(f"identities are checked for x >= 1, got {q.x}")
    return q, ctx or default_context()


def _memo(ctx: Context) -> dict:
    memo = getattr(ctx, "_identity_memo", None)
    if memo is None:
        memo = ctx._identity_memo = {}
    return memo


def _delta(q: Query, ctx: Context) -> float:
    key = ("delta", q.x, q.y)
    memo = _memo(ctx)
    if key not in memo:
        memo[key] = et.delta(q, ctx=ctx)
    return memo[key]


def batch_evaluator(ctx: Context, y: int, t_max: float) -> et.BatchEvaluator:
    """Cached :class:`BatchEvaluator` covering at least [1, t_max]."""
    memo = _memo(ctx)
    key = ("batch", y)
    with ctx._lock:
        cur = memo.get(key)
        if cur is None or cur.t_max < t_max:
            size = max(t_max, 2 * cur.t_max if cur else 0.0, 2.0 * y)
            cur = memo[key] = et.BatchEvaluator(y, size, ctx)
    return cur


@dataclass(frozen=True)
class JumpPieces:
    """Breakpoints log k/log y (plus joints) in (lo, hi) and floor(y^v) on each piece."""

    lo: float
    hi: float
    breakpoints: np.ndarray
    k_of_piece: np.ndarray
    log_y: float

    @classmethod
    def build(cls, y: int, lo: float, hi: float, joints=(), max_breakpoints: int = 10**6):
        log_y = math.log(y)
        k_lo = max(2, math.floor(math.exp(lo * log_y)))
        k_hi = math.floor(math.exp(hi * log_y) * (1 + 1e-15))
        if k_hi - k_lo > max_breakpoints:
            raise ResourceError(f"{k_hi - k_lo} breakpoints exceed the cap of {max_breakpoints}")
        jumps = np.log(np.arange(k_lo, k_hi + 1, dtype=float)) / log_y
        bps = interior_points(np.concatenate((jumps, np.asarray(joints, dtype=float))), lo, hi)
        edges = np.concatenate(([lo], bps, [hi]))
        k = np.floor(np.exp(0.5 * (edges[1:] + edges[:-1]) * log_y))
        return cls(lo, hi, bps, k, log_y)

    def t(self, v: np.ndarray, piece: np.ndarray) -> np.ndarray:
        """y^v, clamped into [k, k+1) of its piece so rounding cannot cross a jump."""
        k = self.k_of_piece[piece]
        return np.clip(np.exp(v * self.log_y), k, np.nextafter(k + 1.0, 0.0))

    def integrate(self, func, ctx: Context, tol: float) -> float:
        """int_lo^hi func(v, t) dv piece by piece."""
        if self.hi <= self.lo:
            return 0.0
        f = PiecewiseIntegrand(self.lo, self.hi, self.breakpoints,
                               lambda v, piece: func(v, self.t(v, piece)))
        return integrate_piecewise(f, gauss_legendre(JUMP_RULE_ORDER), tol,
                                   ctx.limits.quad_max_depth)


def _joints(u: float) -> list[float]:
    return [u - j for j in range(1, int(u) + 1)]


# ---------------------------------------------------------------------------
# Exact reductions for a constant kernel
# ---------------------------------------------------------------------------

def _smooth_upto(ctx: Context, y: int, t: float) -> np.ndarray:
    n = int(math.floor(t))
    counts = ctx.psi_counts(y, n)[: n + 1]
    return np.flatnonzero(np.diff(counts)) + 1


def _harmonic(a: int, b: int) -> float:
    """sum_{a < k <= b} 1/k."""
    if b <= a:
        return 0.0
    if b - a <= 64:
        return math.fsum(1.0 / k for k in range(a + 1, b + 1))
    return float(digamma(b + 1.0) - digamma(a + 1.0))


def psi_part(y: int, t_a: float, t_b: float, ctx: Context | None = None) -> float:
    """(1/log y) int_{t_a}^{t_b} (Psi(t, y) - floor t)/t^2 dt, exactly."""
    ctx = ctx or default_context()
    if t_b <= t_a:
        return 0.0
    a, b = math.floor(t_a), math.floor(t_b)
    sm = _smooth_upto(ctx, y, t_b)
    psi_a = int(np.searchsorted(sm, a, side="right"))
    between = sm[sm > t_a]
    s = ((psi_a - a) * (1.0 / t_a - 1.0 / t_b)
         + math.fsum((1.0 / between).tolist()) - _harmonic(a, b)
         - ((sm.size - psi_a) - (b - a)) / t_b)
    return s / math.log(y)


def lambda_part(y: int, t_a: float, t_b: float, ctx: Context | None = None) -> float:
    """int_{v_a}^{v_b} (Lambda(y^v) - floor(y^v)) y^{-v} dv, exactly from the kernel table."""
    ctx = ctx or default_context()
    if t_b <= t_a:
        return 0.0
    kern = ctx.kernel("rho_prime", y)
    log_y = math.log(y)
    ns = np.arange(1, math.floor(t_b / y) + 1, dtype=float)
    if ns.size == 0:
        return 0.0
    nu = np.log(ns) / log_y
    va, vb = math.log(t_a) / log_y, math.log(t_b) / log_y
    return math.fsum(((kern.integral(vb - nu) - kern.integral(va - nu)) / ns).tolist())


def delta_integral(y: int, t_a: float, t_b: float, ctx: Context | None = None) -> float:
    """int Delta(y^v) y^{-v} dv over y^v in [t_a, t_b], t_a >= 1."""
    if t_a < 1:
        raise DomainError("t_a must be >= 1")
    return psi_part(y, t_a, t_b, ctx) - lambda_part(y, t_a, t_b, ctx)


@dataclass(frozen=True)
class DeltaTail:
    """int_{log T/log y}^inf Delta(y^v) y^{-v} dv and a bound on its rounding error."""

    T: float
    value: float
    uncertainty: float


def delta_tail(y: int, T: float, ctx: Context | None = None) -> DeltaTail:
    ctx = ctx or default_context()
    m = ctx.mertens(y)
    log_y = math.log(y)
    sm = _smooth_upto(ctx, y, T)
    inv_sum = math.fsum((1.0 / sm).tolist())
    tail_psi = (sm.size / T + m.inv_pi_y - inv_sum) / log_y
    k = ctx.kernel("rho", y)
    ns = np.arange(1, math.floor(T) + 1, dtype=float)
    p = math.fsum((k(np.log(T / ns) / log_y) / ns).tolist())
    tail_lambda = EXP_GAMMA - p
    acc = ctx.tables.dickman.accuracy_estimate + ctx.tables.buchstab.accuracy_estimate
    unc = 256 * _EPS * (m.inv_pi_y / log_y + EXP_GAMMA + p) * (1 + math.log(T)) + acc * p
    return DeltaTail(T, tail_psi - tail_lambda, unc)


# ---------------------------------------------------------------------------
# Delta in terms of R and R*
# ---------------------------------------------------------------------------

def residual_thm1eq1_star(x, y: int | None = None, ctx: Context | None = None,
                          tol: float = 1e-12) -> IdentityResidual:
    q, ctx = _prep(x, y, ctx)
    lhs = _delta(q, ctx)
    r_star = et.r_star_error(q, ctx=ctx)
    hi = q.u - 1.0
    integral = 0.0
    if hi > 1.0:
        be = batch_evaluator(ctx, q.y, q.x / q.y)
        pieces = JumpPieces.build(q.y, 1.0, hi, _joints(q.u), ctx.limits.max_breakpoints)
        integral = pieces.integrate(
            lambda v, t: be.r_star_over_t(t) * ctx.tables.rho_prime(q.u - v), ctx, tol)
    return IdentityResidual.make("thm1eq1_star", q.x, q.y, lhs, r_star + q.x * integral,
                                 r_star=r_star, integral=integral)


def _negative_part(q: Query, ctx: Context, how: str) -> float:
    """x int_{-inf}^0 r(v) rho'(u - v) dv with r = -beta there."""
    beta = ctx.mertens(q.y).beta_y
    if how == "analytic":
        return beta * q.x * float(ctx.tables.rho(q.u))
    if how == "numeric":
        # rho'(s) for s > u_max is below 1e-80: the cut is invisible in double precision
        s_hi = ctx.tables.u_max
        bps = interior_points(np.arange(1, int(s_hi) + 1), q.u, s_hi)
        f = PiecewiseIntegrand.smooth(q.u, s_hi, bps, ctx.tables.rho_prime)
        return -beta * q.x * integrate_piecewise(f, gauss_legendre(16), 1e-15)
    raise DomainError(f"unknown negative_part {how!r}")


def _eqvar2(identity_id: str, q: Query, ctx: Context, tol: float, negative_part: str):
    lhs = _delta(q, ctx)
    r = et.r_error(q, ctx=ctx)
    neg = _negative_part(q, ctx, negative_part)
    hi = q.u - 1.0
    integral = 0.0
    if hi > 0.0:
        be = batch_evaluator(ctx, q.y, max(q.x / q.y, 1.0))
        pieces = JumpPieces.build(q.y, 0.0, hi, _joints(q.u), ctx.limits.max_breakpoints)
        integral = pieces.integrate(
            lambda v, t: be.r_over_t(t) * ctx.tables.rho_prime(q.u - v), ctx, tol)
    return IdentityResidual.make(identity_id, q.x, q.y, lhs, neg + r + q.x * integral,
                                 r=r, negative_part=neg, integral=integral)


def residual_thm1eq1(x, y: int | None = None, ctx: Context | None = None, tol: float = 1e-12,
                     negative_part: str = "analytic") -> IdentityResidual:
    """The part over (-inf, 0) is beta x rho(u) (``'analytic'``) or integrated (``'numeric'``)."""
    q, ctx = _prep(x, y, ctx)
    return _eqvar2("thm1eq1", q, ctx, tol, negative_part)


def residual_eqvar2(x, y: int | None = None, ctx: Context | None = None,
                    tol: float = 1e-12) -> IdentityResidual:
    q, ctx = _prep(x, y, ctx)
    return _eqvar2("eqvar2", q, ctx, tol, "analytic")


# ---------------------------------------------------------------------------
# R and R* in terms of Delta
# ---------------------------------------------------------------------------

def _delta_weighted(q: Query, ctx: Context, weight, tol: float, method: str) -> float:
    """int_1^{u-1} d(v) weight(u - v) dv with d evaluated point by point."""
    hi = q.u - 1.0
    if hi <= 1.0:
        return 0.0
    be = batch_evaluator(ctx, q.y, q.x / q.y)
    pieces = JumpPieces.build(q.y, 1.0, hi, _joints(q.u), ctx.limits.max_breakpoints)
    return pieces.integrate(lambda v, t: be.delta_over_t(t, method) * weight(q.u - v), ctx, tol)


def residual_thm1eq2_star(x, y: int | None = None, ctx: Context | None = None,
                          tol: float = 1e-12, method: str = "kernel") -> IdentityResidual:
    """``method='quadrature'`` runs one Lambda quadrature per node (slow; small x only)."""
    q, ctx = _prep(x, y, ctx)
    lhs = et.r_star_error(q, ctx=ctx)
    d = _delta(q, ctx)
    integral = _delta_weighted(q, ctx, ctx.tables.omega, tol, method)
    return IdentityResidual.make("thm1eq2_star", q.x, q.y, lhs, d + q.x * integral,
                                 delta=d, integral=integral)


def residual_thm1eq2(x, y: int | None = None, ctx: Context | None = None, tol: float = 1e-12,
                     x_cap: float = DEFAULT_X_CAP, tail: str = "closed",
                     method: str = "kernel") -> IdentityResidual:
    """R(x) against Delta(x) + x int_0^inf d(v) (omega(u-v) - e^{-gamma}) dv.

    The integral splits into [1, u-1] (quadrature, varying kernel),
    [u-1, log x_cap/log y] (exact reduction, constant kernel) and the rest.
    ``tail='closed'`` evaluates the rest in closed form and the budget is
    that evaluation's rounding bound; ``tail='truncate'`` drops it and the
    budget is its magnitude.
    """
    q, ctx = _prep(x, y, ctx)
    if tail not in ("closed", "truncate"):
        raise DomainError(f"unknown tail mode {tail!r}")
    cap = max(float(x_cap), q.x)
    lhs = et.r_error(q, ctx=ctx)
    d = _delta(q, ctx)
    varying = _delta_weighted(q, ctx, ctx.tables.omega_minus_egamma, tol, method)
    middle = -EXP_NEG_GAMMA * delta_integral(q.y, max(q.x / q.y, 1.0), cap, ctx)
    rest = delta_tail(q.y, cap, ctx)
    omitted = -EXP_NEG_GAMMA * rest.value
    if tail == "closed":
        rhs = d + q.x * (varying + middle + omitted)
        budget = EXP_NEG_GAMMA * rest.uncertainty
    else:
        rhs = d + q.x * (varying + middle)
        budget = abs(omitted) + EXP_NEG_GAMMA * rest.uncertainty
    return IdentityResidual.make("thm1eq2", q.x, q.y, lhs, rhs, budget, delta=d,
                                 varying=varying, middle=middle, tail=omitted, tail_mode=tail,
                                 x_cap=cap)


# ---------------------------------------------------------------------------
# Sum and integral equations for Psi
# ---------------------------------------------------------------------------

def residual_lemma_sum(x, y: int | None = None, ctx: Context | None = None) -> IdentityResidual:
    q, ctx = _prep(x, y, ctx)
    m = ctx.mertens(q.y)
    lhs = float(ctx.psi(q.x, q.y))
    s = 0.0
    if q.x > q.y:
        ns = ctx.smooth(q.y, q.x / q.y).below(q.x / q.y).astype(float)
        mu = ctx.mu_table(q.y)(np.log(q.x / ns) / math.log(q.y))
        s = math.fsum((mu / ns).tolist())
    r = et.r_error(q, ctx=ctx)
    rhs = m.alpha_y * q.x - q.x * s + r - q.frac
    return IdentityResidual.make("lemma_sum", q.x, q.y, lhs, rhs, sum=s, r=r)


def residual_lemma_integral(x, y: int | None = None, ctx: Context | None = None,
                            tol: float = 1e-13) -> IdentityResidual:
    q, ctx = _prep(x, y, ctx)
    m = ctx.mertens(q.y)
    lhs = float(ctx.psi(q.x, q.y))
    log_y = math.log(q.y)
    t_hi = q.x / q.y                 # omega(log(x/t)/log y) = 0 for t > x/y
    integral = 0.0
    if t_hi > 1.0:
        counts = ctx.psi_counts(q.y, t_hi)
        k_top = math.floor(t_hi)
        if k_top > ctx.limits.max_breakpoints:
            raise ResourceError(f"{k_top} breakpoints exceed the cap")
        joints = [q.x / q.y ** j for j in range(2, int(q.u) + 1)]
        bps = interior_points(np.concatenate((np.arange(2, k_top + 1, dtype=float), joints)),
                              1.0, t_hi)
        edges = np.concatenate(([1.0], bps, [t_hi]))
        psi_piece = counts[np.floor(0.5 * (edges[1:] + edges[:-1])).astype(np.int64)].astype(float)

        def f(t, piece):
            return psi_piece[piece] * ctx.tables.omega(np.log(q.x / t) / log_y) / (t * t * log_y)

        integral = integrate_piecewise(PiecewiseIntegrand(1.0, t_hi, bps, f),
                                       gauss_legendre(ctx.limits.quad_order), tol / q.x)
    r = et.r_error(q, ctx=ctx)
    rhs = m.alpha_y * q.x - q.x * integral + r - q.frac
    return IdentityResidual.make("lemma_integral", q.x, q.y, lhs, rhs, integral=integral, r=r)


# ---------------------------------------------------------------------------
# beta integral
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BetaIntegralCheck:
    """e^{-gamma} int_0^{v_max} d(v) dv - beta_y, with the omitted remainder.

    ``budget`` is the size of the omitted part e^{-gamma} int_{v_max}^inf d,
    computed in closed form, plus that evaluation's rounding bound;
    ``corrected_defect`` adds the remainder back.
    """

    y: int
    v_max: float
    integral: float
    defect: float
    budget: float
    omitted: float
    corrected_defect: float
    below_one: float


def beta_integral_check(y: int, ctx: Context | None = None, v_max: float | None = None,
                        method: str = "reduced", tol: float = 1e-12) -> BetaIntegralCheck:
    """``method='quadrature'`` integrates d(v) point by point (feasible for y^v_max <= ~1e5)."""
    ctx = ctx or default_context()
    if int(y) != y or y < 2:
        raise DomainError(f"y must be an integer >= 2, got {y!r}")
    y = int(y)
    log_y = math.log(y)
    if v_max is None:
        v_max = math.log(DEFAULT_BETA_CAP) / log_y
    if v_max < 1:
        raise DomainError("v_max must be >= 1")
    T = math.exp(v_max * log_y)
    if T > ctx.limits.max_x:
        raise ResourceError(f"y^v_max = {T:g} exceeds the cap {ctx.limits.max_x}")
    if method not in ("reduced", "quadrature"):
        raise DomainError(f"unknown method {method!r}")
    be = batch_evaluator(ctx, y, T if method == "quadrature" else float(y))
    # d(v) = 0 for v <= 1; computed rather than assumed
    low = JumpPieces.build(y, 0.0, 1.0)
    below_one = low.integrate(lambda v, t: be.delta_over_t(t), ctx, tol)
    if method == "reduced":
        integral = below_one + delta_integral(y, float(y), T, ctx)
    else:
        pieces = JumpPieces.build(y, 1.0, v_max, (), ctx.limits.max_breakpoints)
        integral = below_one + pieces.integrate(lambda v, t: be.delta_over_t(t), ctx, tol)
    beta = ctx.mertens(y).beta_y
    rest = delta_tail(y, T, ctx)
    defect = EXP_NEG_GAMMA * integral - beta
    omitted = EXP_NEG_GAMMA * rest.value
    budget = abs(omitted) + EXP_NEG_GAMMA * rest.uncertainty
    return BetaIntegralCheck(y, v_max, integral, defect, budget, omitted, defect + omitted,
                             below_one)


def residual_beta_integral(y: int, ctx: Context | None = None,
                           v_max: float | None = None) -> IdentityResidual:
    """The full identity (remainder in closed form); x is reported as y^v_max."""
    ctx = ctx or default_context()
    chk = beta_integral_check(y, ctx, v_max)
    lhs = EXP_NEG_GAMMA * chk.integral + chk.omitted
    rest_unc = chk.budget - abs(chk.omitted)
    return IdentityResidual.make("beta_integral", float(int(y) ** chk.v_max), int(y), lhs,
                                 ctx.mertens(int(y)).beta_y, rest_unc, scale=1.0,
                                 truncated_defect=chk.defect, omitted=chk.omitted,
                                 v_max=chk.v_max)


# ---------------------------------------------------------------------------
# Auxiliary exact identities used by the suites
# ---------------------------------------------------------------------------

def factorization_residuals(x_max: int, y: int, ctx: Context | None = None) -> np.ndarray:
    """m - sum_{smooth n <= m} Phi(m // n, y) for m = 1..x_max (all zero), in integers."""
    ctx = ctx or default_context()
    x_max = int(x_max)
    if x_max < 1:
        raise DomainError("x_max must be >= 1")
    counts = ctx.rough(y, x_max).counts
    m = np.arange(1, x_max + 1, dtype=np.int64)
    acc = np.zeros(x_max, dtype=np.int64)
    for n in ctx.smooth(y, x_max).values.tolist():
        if n > x_max:
            break
        acc[n - 1:] += counts[m[n - 1:] // n]
    return m - acc


_POINT_FUNCS = {
    "thm1eq1": residual_thm1eq1,
    "thm1eq1_star": residual_thm1eq1_star,
    "thm1eq2": residual_thm1eq2,
    "thm1eq2_star": residual_thm1eq2_star,
    "eqvar2": residual_eqvar2,
    "lemma_sum": residual_lemma_sum,
    "lemma_integral": residual_lemma_integral,
}


def _mobius_rows(x: float, y: int, ctx: Context) -> list[IdentityResidual]:
    rows = []
    for starred in (False, True):
        res = et.mobius_inversion_residual(x, y, ctx, starred=starred)
        rows.append(IdentityResidual("mobius_star" if starred else "mobius", x, y,
                                     res, 0.0, res, res / x))
    return rows


def _convolution_row(u: float, ctx: Context) -> list[IdentityResidual]:
    from .special import dickman_buchstab_convolution_residual
    res = dickman_buchstab_convolution_residual(u, ctx.tables)
    return [IdentityResidual("convolution297", u, None, res, 0.0, res, res)]


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------

def _tasks(suite: str, grid: Grid, ctx: Context, options: dict):
    if suite in _POINT_FUNCS:
        fn = _POINT_FUNCS[suite]
        return [((x, y), (lambda x=x, y=y: [fn(x, y, ctx, **options)])) for x, y in grid.points()]
    if suite == "mobius":
        return [((x, y), (lambda x=x, y=y: _mobius_rows(x, y, ctx))) for x, y in grid.points()]
    if suite == "convolution297":
        return [((u, None), (lambda u=u: _convolution_row(u, ctx))) for u in grid.xs]
    if suite == "beta_integral":
        return [((None, y), (lambda y=y: [residual_beta_integral(y, ctx, **options)]))
                for y in grid.ys]
    if suite == "factorization":
        x_max = int(max(grid.xs))

        def run(y):
            res = factorization_residuals(x_max, y, ctx)
            return [IdentityResidual("factorization", float(m), y, float(m - r), float(m),
                                     float(-r), float(-r) / m)
                    for m, r in zip(range(1, x_max + 1), (-res).tolist())]
        return [((x_max, y), (lambda y=y: run(y))) for y in grid.ys]
    raise DomainError(f"unknown suite {suite!r}; expected one of {SUITES + ('all',)}")


def _validate(suite: str, grid: Grid):
    if not grid.ys and suite != "convolution297":
        raise DomainError("grid has no y values")
    if not grid.xs and suite != "beta_integral":
        raise DomainError("grid has no x values")
    if suite == "convolution297":
        if min(grid.xs) < 0:
            raise DomainError("convolution identity needs u >= 0")
    elif suite != "beta_integral" and min(grid.xs) < 1:
        raise DomainError(f"grid contains x = {min(grid.xs)} < 1")
    if grid.ys and min(grid.ys) < 2:
        raise DomainError("grid contains y < 2")


def _assemble(suite: str, grid: Grid, tol: float, rows: list, errors: list) -> VerificationReport:
    if rows:
        worst_row = max(rows, key=lambda r: abs(r.scaled_residual))
        max_res = abs(worst_row.scaled_residual)
        worst = {"x": worst_row.x, "y": worst_row.y, "identity": worst_row.identity_id}
    else:
        max_res, worst = float("nan"), None
    max_budget = max((r.budget for r in rows), default=0.0)
    statuses = {r.status(tol) for r in rows}
    if "fail" in statuses:
        status = "fail"
    elif errors or "inconclusive" in statuses or not rows:
        status = "inconclusive"
    else:
        status = "pass"
    return VerificationReport(suite, grid.describe(), tol, rows, errors, max_res, worst,
                              bool(rows) and max_res <= tol, max_budget, status)


def run_suite(suite: str, grid: Grid, tol: float, ctx: Context | None = None,
              workers: int = 1, **options) -> VerificationReport:
    """Evaluate one suite over a grid.

    Points that raise a package error are listed in ``errors`` and make the
    suite inconclusive.  Rows keep grid order whatever the completion order.
    ``suite='all'`` runs every suite on the same grid and merges the rows;
    convolution297 takes u values, so there it uses ``DEFAULT_U_SPEC``.
    """
    ctx = ctx or default_context()
    if suite == "all":
        u_grid = Grid.make(parse_values(DEFAULT_U_SPEC), (), DEFAULT_U_SPEC)
        subs = [run_suite(s, u_grid if s == "convolution297" else grid, tol, ctx, workers)
                for s in SUITES]
        rows = [r for s in subs for r in s.points]
        errors = [e for s in subs for e in s.errors]
        return _assemble("all", grid, tol, rows, errors)
    if suite not in SUITES:
        raise DomainError(f"unknown suite {suite!r}; expected one of {SUITES + ('all',)}")
    _validate(suite, grid)
    tasks = _tasks(suite, grid, ctx, options)

    def guarded(task):
        where, fn = task
        try:
            return fn(), None
        except FriableError as exc:
            return [], {"x": where[0], "y": where[1], "error": f"{type(exc).__name__}: {exc}"}

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(guarded, tasks))
    else:
        results = [guarded(t) for t in tasks]
    rows = [r for got, _ in results for r in got]
    errors = [err for _, err in results if err is not None]
    return _assemble(suite, grid, tol, rows, errors)


__all__ = [
    "IDENTITY_IDS", "SUITES", "IdentityResidual", "VerificationReport", "JumpPieces",
    "DeltaTail", "BetaIntegralCheck", "batch_evaluator", "psi_part", "lambda_part",
    "delta_integral", "delta_tail", "residual_thm1eq1", "residual_thm1eq1_star",
    "residual_eqvar2", "residual_thm1eq2", "residual_thm1eq2_star", "residual_lemma_sum",
    "residual_lemma_integral", "beta_integral_check", "residual_beta_integral",
    "factorization_residuals", "run_suite",
]
