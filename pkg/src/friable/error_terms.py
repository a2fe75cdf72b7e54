"""Error terms Delta, Q, Q*, R, R* and the Moebius inversion between Q and R.

    Delta = Psi - Lambda,   Q = V - Phi,   Q* = V* - Phi,
    R(x)  = sum_{n smooth} Q(x/n),   R*(x) = sum_{n smooth} Q*(x/n).

For 0 < x <= y every term has a closed form (Phi = 1_{x>=1}, mu_y = 0):
Q* = R* = 0, Q = x (Pi(y) - e^{-gamma}/log y), R = -beta_y x.  The
infinite sums are therefore split at n = x/y: the head n < x/y is summed
term by term and the tail n >= x/y uses the closed form together with
sum_{n smooth} 1/n = 1/Pi(y).  A term with x/n = y exactly belongs to the
tail.

The ``*_over_t`` functions evaluate the same quantities divided by t on
whole arrays of t; they feed the integrals of the identity checks.  They
use two exact rearrangements:

    sum_{n smooth, n<t/y} (1 - Phi(t/n)) = A[floor(t)]   (a step function),
    Psi(t) - floor(t) = A[floor(t)]                      (factorisation identity),

so R*(t)/t = A[floor t]/t + M(t) with M(t) = sum_{n<t/y} mu_y(log(t/n)/log y)/n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import approx
from .approx import Query, _query, kernel_sum
from .arith import EXP_NEG_GAMMA
from .context import Context, default_context
from .exceptions import DomainError


def _ctx(ctx):
    return ctx or default_context()


# ---------------------------------------------------------------------------
# Point evaluations
# ---------------------------------------------------------------------------

def psi(x: float, y: int, ctx: Context | None = None) -> int:
    return _ctx(ctx).psi(x, y)


def phi(x: float, y: int, ctx: Context | None = None) -> int:
    ctx = _ctx(ctx)
    y = _query(max(x, 1.0), y).y
    if x < 1:
        return 0
    return int(ctx.rough(y, x).counts[int(math.floor(x))])


def delta(x, y: int | None = None, ctx: Context | None = None) -> float:
    """Psi(x, y) - Lambda(x, y) for x >= 1."""
    q = _query(x, y)
    ctx = _ctx(ctx)
    if q.x < 1:
        raise DomainError("Delta is defined for x >= 1 only")
    p = ctx.psi(q.x, q.y)
    lam = approx.lambda_approx(q, ctx=ctx)
    ctx.monitor.record(q.x, q.y, p, lam)
    return p - lam


def q_error(x, y: int | None = None, ctx: Context | None = None) -> float:
    q = _query(x, y)
    ctx = _ctx(ctx)
    return approx.v_approx(q, ctx=ctx) - phi(q.x, q.y, ctx)


def q_star_error(x, y: int | None = None, ctx: Context | None = None) -> float:
    q = _query(x, y)
    ctx = _ctx(ctx)
    return approx.v_star_approx(q, ctx=ctx) - phi(q.x, q.y, ctx)


def _head(q: Query, ctx: Context) -> np.ndarray:
    """Smooth n with n < x/y."""
    if q.x <= q.y:
        return np.zeros(0, dtype=np.int64)
    return ctx.smooth(q.y, q.x / q.y).below(q.x / q.y)


def _head_terms(q: Query, ctx: Context, slope: float) -> np.ndarray:
    """Q(x/n) (slope = q_slope) or Q*(x/n) (slope = 0) for every head n."""
    ns = _head(q, ctx)
    if ns.size == 0:
        return np.zeros(0)
    z = q.x / ns
    mu = ctx.mu_table(q.y)(np.log(z) / math.log(q.y))
    rough = ctx.rough(q.y, z.max()).counts[np.floor(z).astype(np.int64)]
    return 1.0 + z * (slope + mu) - rough


def r_error(x, y: int | None = None, ctx: Context | None = None) -> float:
    """R(x, y): head of Q(x/n) terms plus the closed-form tail over n >= x/y."""
    q = _query(x, y)
    ctx = _ctx(ctx)
    m = ctx.mertens(q.y)
    head = _head_terms(q, ctx, m.q_slope)
    ns = _head(q, ctx)
    harmonic = math.fsum((1.0 / ns).tolist()) if ns.size else 0.0
    tail = q.x * m.q_slope * (m.inv_pi_y - harmonic)
    return math.fsum(head.tolist()) + tail


def r_star_error(x, y: int | None = None, ctx: Context | None = None) -> float:
    """R*(x, y): a finite sum, since Q*(x/n) = 0 once x/n <= y."""
    q = _query(x, y)
    ctx = _ctx(ctx)
    return math.fsum(_head_terms(q, ctx, 0.0).tolist())


def r_star_via_rreq(x, y: int | None = None, ctx: Context | None = None) -> float:
    """R*(x, y) computed as R(x, y) + beta_y x."""
    q = _query(x, y)
    ctx = _ctx(ctx)
    return r_error(q, ctx=ctx) + ctx.mertens(q.y).beta_y * q.x


def mobius_inversion_residual(x, y: int | None = None, ctx: Context | None = None,
                              starred: bool = False) -> float:
    """Q(x) - sum_{n smooth} mu(n) R(x/n)  (or the starred pair).

    Only squarefree n contribute.  For n >= x/y the closed forms apply:
    R*(x/n) = 0 and R(x/n) = -beta_y x/n, and
    sum_{n smooth} mu(n)/n = Pi(y) sums the unstarred tail exactly.
    """
    q = _query(x, y)
    ctx = _ctx(ctx)
    m = ctx.mertens(q.y)
    lhs = q_star_error(q, ctx=ctx) if starred else q_error(q, ctx=ctx)
    enum = ctx.smooth(q.y, max(q.x / q.y, 1.0))
    k = np.searchsorted(enum.values, q.x / q.y, side="left")
    ns, mob = enum.values[:k], enum.mobius[:k].astype(float)
    keep = mob != 0
    ns, mob = ns[keep], mob[keep]
    rfun = r_star_error if starred else r_error
    head = [mb * rfun(q.x / n, q.y, ctx) for n, mb in zip(ns.tolist(), mob.tolist())]
    rhs = math.fsum(head)
    if not starred:
        partial = math.fsum((mob / ns).tolist())
        rhs += -m.beta_y * q.x * (m.pi_y - partial)
    return lhs - rhs


# ---------------------------------------------------------------------------
# Vectorised evaluation over many t (used inside integrals)
# ---------------------------------------------------------------------------

def rough_excess(y: int, k_max: int, ctx: Context | None = None) -> np.ndarray:
    """A[k] = sum over smooth n <= k/y of (1 - Phi(k // n, y)), for 0 <= k <= k_max."""
    ctx = _ctx(ctx)
    out = np.zeros(k_max + 1, dtype=np.int64)
    if k_max < y:
        return out
    counts = ctx.rough(y, k_max).counts
    for n in ctx.smooth(y, k_max / y + 1).below(k_max / y + 1).tolist():
        ks = np.arange(n * y, k_max + 1)
        if ks.size == 0:
            break
        out[ks] += 1 - counts[ks // n]
    return out


@dataclass
class BatchEvaluator:
    """R/t, R*/t and Delta/t on arrays of t in [1, t_max] for one y."""

    y: int
    t_max: float
    ctx: Context

    def __post_init__(self):
        ctx, y = self.ctx, self.y
        self.k_max = int(math.floor(self.t_max))
        self.mertens = ctx.mertens(y)
        self.excess = rough_excess(y, self.k_max, ctx)
        self.smooth = ctx.smooth(y, self.t_max / y + 1).below(self.t_max / y + 1)
        self.harmonic = np.concatenate(([0.0], np.cumsum(1.0 / self.smooth)))
        self._psi = None

    def _check(self, t):
        t = np.asarray(t, dtype=float)
        if t.size and (t.min() < 1 or t.max() > self.t_max * (1 + 1e-12)):
            raise DomainError(f"t outside [1, {self.t_max}]")
        return t

    def r_star_over_t(self, t) -> np.ndarray:
        t = self._check(t)
        k = np.floor(t).astype(np.int64)
        m = kernel_sum(t, self.smooth, self.ctx.mu_table(self.y), self.y)
        return self.excess[k] / t + m

    def r_over_t(self, t) -> np.ndarray:
        """R(t)/t = head(Q terms)/t + closed tail/t, assembled separately."""
        t = self._check(t)
        k = np.floor(t).astype(np.int64)
        mert = self.mertens
        m = kernel_sum(t, self.smooth, self.ctx.mu_table(self.y), self.y)
        n_head = np.searchsorted(self.smooth, t / self.y, side="left")
        h = self.harmonic[n_head]
        head = self.excess[k] / t + m + mert.q_slope * h
        tail = mert.q_slope * (mert.inv_pi_y - h)
        return head + tail

    def psi_counts(self) -> np.ndarray:
        if self._psi is None:
            self._psi = self.ctx.psi_counts(self.y, self.k_max)
        return self._psi

    def delta_over_t(self, t, method: str = "kernel") -> np.ndarray:
        """Delta(t)/t; ``method='quadrature'`` runs one Lambda quadrature per point."""
        t = self._check(t)
        k = np.floor(t).astype(np.int64)
        psi_k = self.psi_counts()[k]
        if method == "quadrature":
            lam = np.array([approx.lambda_approx(v, self.y, self.ctx)
                            for v in t.ravel().tolist()]).reshape(t.shape)
        else:
            n_top = int(math.floor(self.t_max / self.y))
            ns = np.arange(1, n_top + 1, dtype=float)
            lam = k + t * kernel_sum(t, ns, self.ctx.kernel("rho_prime", self.y), self.y)
        self.ctx.monitor.record(t.ravel(), self.y, psi_k.ravel(), lam.ravel())
        return (psi_k - lam) / t


def closed_form_q(x: float, y: int, ctx: Context | None = None) -> float:
    """x (Pi(y) - e^{-gamma}/log y), the value of Q on 0 < x <= y."""
    return x * _ctx(ctx).mertens(y).q_slope


def closed_form_r(x: float, y: int, ctx: Context | None = None) -> float:
    """x (1 - e^{-gamma} Pi(y)^{-1}/log y) = -beta_y x, the value of R on 0 < x <= y."""
    m = _ctx(ctx).mertens(y)
    return x * (1.0 - EXP_NEG_GAMMA / math.log(y) * m.inv_pi_y)
