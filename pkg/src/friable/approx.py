"""De Bruijn's approximants mu_y, Lambda, V, V* and W.

    Lambda(x, y) = x rho(u) - {x} - x int_0^u rho'(u - v) {y^v}/y^v dv
    mu_y(u)      = int_0^u omega(u - v) y^{-v} dv
    V(x, y)      = 1_{x>=1} + x (Pi(y) - e^{-gamma}/log y + mu_y(u))
    V*(x, y)     = 1_{x>=1} + x mu_y(u)
    W(x, y)      = x mu_y(u) Pi(y) e^{gamma} log y

with u = log x / log y.

Besides the direct breakpoint quadrature for Lambda there is a summed
form used when Lambda is needed at many points.  Writing
{y^v}/y^v = 1 - floor(y^v)/y^v and expanding floor(t y^{-s}) as a count
over n gives

    Lambda(t, y) = floor(t) + t * sum_{n <= t/y} f_y(log(t/n)/log y) / n,
    f_y(a)       = int_1^a rho'(s) y^{-(a - s)} ds,

so each evaluation is a finite sum over one tabulated kernel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .arith import EXP_GAMMA, EXP_NEG_GAMMA
from .context import Context, default_context
from .exceptions import DomainError, ResourceError
from .quadrature import PiecewiseIntegrand, gauss_legendre, integrate_piecewise, interior_points
from .special import ExpConvolutionTable, Tables


@dataclass(frozen=True)
class Query:
    x: float
    y: int
    u: float

    @classmethod
    def make(cls, x: float, y: int) -> "Query":
        if int(y) != y or y < 2:
            raise DomainError(f"y must be an integer >= 2, got {y!r}")
        if not x > 0:
            raise DomainError(f"x must be positive, got {x!r}")
        return cls(float(x), int(y), math.log(x) / math.log(y))

    @property
    def frac(self) -> float:
        return self.x - math.floor(self.x)


def _query(x, y) -> Query:
    return x if isinstance(x, Query) else Query.make(x, y)


# ---------------------------------------------------------------------------
# mu_y
# ---------------------------------------------------------------------------

def mu_y(u: float, y: int, tables: Tables, tol: float = 1e-15) -> float:
    """mu_y(u) by breakpoint-aware quadrature (omega's joints at v = u - j)."""
    if u > tables.u_max:
        raise DomainError(f"u={u} beyond table range {tables.u_max}")
    if u <= 1.0:
        return 0.0
    log_y = math.log(y)
    hi = u - 1.0
    bps = interior_points([u - j for j in range(2, int(u) + 1)], 0.0, hi)
    f = PiecewiseIntegrand.smooth(0.0, hi, bps,
                                  lambda v: tables.omega(u - v) * np.exp(-log_y * v))
    return integrate_piecewise(f, gauss_legendre(16), tol)


def mu_ode_residual(u: float, y: int, tables: Tables, step: float = 1e-5) -> float:
    """mu_y(u) log y + mu_y'(u) - omega(u) with a centred difference for mu_y'."""
    if abs(u - 1.0) < 1e-4:
        raise DomainError("mu_y' jumps at u = 1")
    if u < 0:
        raise DomainError("u must be >= 0")
    d = (mu_y(u + step, y, tables) - mu_y(u - step, y, tables)) / (2 * step)
    return mu_y(u, y, tables) * math.log(y) + d - tables.omega(u)


# ---------------------------------------------------------------------------
# Lambda
# ---------------------------------------------------------------------------

def lambda_integral(q: Query, tables: Tables, tol: float = 1e-13,
                    max_breakpoints: int = 10**6) -> float:
    """int_0^u rho'(u - v) {y^v}/y^v dv with a breakpoint at every y^v in Z.

    rho'(u - v) vanishes for v > u - 1, so only [0, u - 1] contributes; on
    the piece where floor(y^v) = k the integrand is (1 - k y^{-v}) rho'(u - v).
    """
    hi = q.u - 1.0
    if hi <= 0:
        return 0.0
    log_y = math.log(q.y)
    k_top = math.floor(math.exp(hi * log_y) * (1 + 1e-15))
    if k_top - 1 > max_breakpoints:
        raise ResourceError(f"{k_top - 1} breakpoints exceed the cap of {max_breakpoints}")
    jumps = np.log(np.arange(2, k_top + 1, dtype=float)) / log_y
    joints = [q.u - j for j in range(2, int(q.u) + 1)]
    bps = interior_points(np.concatenate((jumps, joints)), 0.0, hi)
    edges = np.concatenate(([0.0], bps, [hi]))
    k_of_piece = np.floor(np.exp(0.5 * (edges[1:] + edges[:-1]) * log_y)).astype(float)
    u = q.u

    def integrand(v, piece):
        return (1.0 - k_of_piece[piece] * np.exp(-log_y * v)) * tables.rho_prime(u - v)

    return integrate_piecewise(PiecewiseIntegrand(0.0, hi, bps, integrand), gauss_legendre(16), tol)


def lambda_approx(x, y: int | None = None, ctx: Context | None = None, tol: float = 1e-13) -> float:
    """Lambda(x, y) for x >= 1 by direct quadrature."""
    q = _query(x, y)
    ctx = ctx or default_context()
    if q.x < 1:
        raise DomainError("Lambda is defined for x >= 1 only")
    if q.u > ctx.tables.u_max:
        raise DomainError(f"u={q.u} beyond table range")
    integral = lambda_integral(q, ctx.tables, tol, ctx.limits.max_breakpoints)
    return q.x * ctx.tables.rho(q.u) - q.frac - q.x * integral


def kernel_sum(t: np.ndarray, ns: np.ndarray, kernel: ExpConvolutionTable, y: int) -> np.ndarray:
    """S(t) = sum over n in ``ns`` with n < t/y of kernel(log(t/n)/log y)/n.

    Terms with t/n <= y vanish because every kernel is 0 at arguments <= 1.
    Work is organised per n over the sorted suffix of t it affects.
    """
    t = np.asarray(t, dtype=float)
    flat = t.ravel()
    order = np.argsort(flat, kind="stable")
    ts = flat[order]
    log_t = np.log(ts)
    log_y = math.log(y)
    acc = np.zeros(ts.size)
    starts = np.searchsorted(ts, np.asarray(ns, dtype=float) * y, side="right")
    for n, s in zip(np.asarray(ns, dtype=float).tolist(), starts.tolist()):
        if s >= ts.size:
            break
        acc[s:] += kernel((log_t[s:] - math.log(n)) / log_y) / n
    out = np.empty_like(acc)
    out[order] = acc
    return out.reshape(t.shape)


def lambda_kernel_sum(x, y: int, ctx: Context | None = None) -> np.ndarray:
    """Lambda(x, y) for an array of x >= 1 through the summed form."""
    ctx = ctx or default_context()
    x = np.asarray(x, dtype=float)
    if x.size and x.min() < 1:
        raise DomainError("Lambda is defined for x >= 1 only")
    n_top = int(math.floor(x.max() / y)) if x.size else 0
    ns = np.arange(1, n_top + 1, dtype=float)
    s = kernel_sum(x, ns, ctx.kernel("rho_prime", y), y)
    return np.floor(x) + x * s


# ---------------------------------------------------------------------------
# V, V*, W
# ---------------------------------------------------------------------------

def _mu(q: Query, ctx: Context) -> float:
    return float(ctx.mu_table(q.y)(q.u))


def v_approx(x, y: int | None = None, ctx: Context | None = None) -> float:
    q = _query(x, y)
    ctx = ctx or default_context()
    m = ctx.mertens(q.y)
    return (1.0 if q.x >= 1 else 0.0) + q.x * (m.q_slope + _mu(q, ctx))


def v_star_approx(x, y: int | None = None, ctx: Context | None = None) -> float:
    q = _query(x, y)
    ctx = ctx or default_context()
    return (1.0 if q.x >= 1 else 0.0) + q.x * _mu(q, ctx)


def w_approx(x, y: int | None = None, ctx: Context | None = None) -> float:
    q = _query(x, y)
    ctx = ctx or default_context()
    m = ctx.mertens(q.y)
    return q.x * _mu(q, ctx) * m.pi_y * EXP_GAMMA * math.log(q.y)


__all__ = ["Query", "mu_y", "mu_ode_residual", "lambda_integral", "lambda_approx", "kernel_sum",
           "lambda_kernel_sum", "v_approx", "v_star_approx", "w_approx", "EXP_NEG_GAMMA"]
