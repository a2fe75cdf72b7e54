"""Exact arithmetic: primes, smooth and rough counts, Mertens products.

Conventions used throughout the package:

* counts are over ``1 <= n <= x`` (inclusive) and depend only on ``floor(x)``;
* ``n = 1`` is both y-smooth and y-rough, since it has no prime factors;
* sums over the infinite set of y-smooth numbers are split into a finite
  head and a tail evaluated in closed form through
  ``sum_{n smooth} 1/n = prod_{p<=y} (1 - 1/p)^{-1}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .config import DEFAULT_LIMITS, Limits
from .exceptions import DomainError, ResourceError

# 20 significant digits; more than double precision can hold.
EULER_GAMMA = 0.57721566490153286061
EXP_NEG_GAMMA = 0.56145948356688516982
EXP_GAMMA = 1.7810724179901979852


# ---------------------------------------------------------------------------
# Primes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PrimeTable:
    limit: int
    primes: np.ndarray

    def upto(self, y: float) -> np.ndarray:
        if y > self.limit:
            raise DomainError(f"prime table only reaches {self.limit}, need {y}")
        return self.primes[: np.searchsorted(self.primes, math.floor(y), side="right")]

    def count(self, y: float) -> int:
        return len(self.upto(y))

    def __len__(self) -> int:
        return len(self.primes)


def sieve_primes(limit: int) -> PrimeTable:
    """Sieve of Eratosthenes on a bytearray-backed numpy mask."""
    limit = int(limit)
    if limit < 2:
        raise DomainError(f"sieve limit must be >= 2, got {limit}")
    mask = np.ones(limit + 1, dtype=bool)
    mask[:2] = False
    mask[4::2] = False
    for p in range(3, math.isqrt(limit) + 1, 2):
        if mask[p]:
            mask[p * p::2 * p] = False
    return PrimeTable(limit, np.flatnonzero(mask).astype(np.int64))


@lru_cache(maxsize=8)
def _cached_primes(limit: int) -> PrimeTable:
    return sieve_primes(limit)


def default_primes(limit: float) -> PrimeTable:
    """A shared prime table reaching at least ``limit`` (rounded up to a power of two)."""
    need = max(int(limit), 2**16)
    return _cached_primes(1 << (need - 1).bit_length())


def _table_for(y: float, primes: PrimeTable | None) -> PrimeTable:
    if primes is None:
        return default_primes(y)
    if primes.limit < y:
        raise DomainError(f"prime table limit {primes.limit} is below y={y}")
    return primes


def _check_y(y) -> int:
    if int(y) != y or y < 2:
        raise DomainError(f"y must be an integer >= 2, got {y!r}")
    return int(y)


# ---------------------------------------------------------------------------
# Mertens product
# ---------------------------------------------------------------------------

def pi_product(y: int, primes: PrimeTable | None = None) -> float:
    """prod_{p<=y} (1 - 1/p), via an exactly rounded sum of log1p terms."""
    y = _check_y(y)
    ps = _table_for(y, primes).upto(y).astype(float)
    return math.exp(math.fsum(np.log1p(-1.0 / ps).tolist()))


@dataclass(frozen=True)
class MertensData:
    y: int
    pi_y: float
    inv_pi_y: float
    alpha_y: float
    beta_y: float

    @property
    def q_slope(self) -> float:
        """Pi(y) - e^{-gamma}/log y, the slope of Q(x, y) on 0 < x <= y."""
        return self.pi_y - EXP_NEG_GAMMA / math.log(self.y)


def mertens_data(y: int, primes: PrimeTable | None = None) -> MertensData:
    y = _check_y(y)
    ps = _table_for(y, primes).upto(y).astype(float)
    log_pi = math.fsum(np.log1p(-1.0 / ps).tolist())
    pi_y = math.exp(log_pi)
    inv_pi_y = math.exp(-log_pi)
    alpha = EXP_NEG_GAMMA / math.log(y) * inv_pi_y
    return MertensData(y, pi_y, inv_pi_y, alpha, alpha - 1.0)


# ---------------------------------------------------------------------------
# Smooth numbers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SmoothEnumeration:
    """All y-smooth n <= limit in ascending order, with their Moebius values."""

    y: int
    limit: float
    values: np.ndarray
    mobius: np.ndarray

    def count(self, x: float) -> int:
        if x > self.limit:
            raise DomainError(f"enumeration reaches {self.limit}, asked for {x}")
        return int(np.searchsorted(self.values, math.floor(x), side="right"))

    def below(self, t: float) -> np.ndarray:
        """Smooth n with n < t (strict)."""
        if t > self.limit + 1:
            raise DomainError(f"enumeration reaches {self.limit}, asked below {t}")
        return self.values[: np.searchsorted(self.values, t, side="left")]

    def __len__(self) -> int:
        return len(self.values)


def enumerate_smooth(y: int, limit: float, primes: PrimeTable | None = None,
                     cap: int | None = None) -> SmoothEnumeration:
    """Multiply out prime powers p^e <= limit over all p <= y, then sort.

    Moebius values ride along: a first power flips the sign, higher powers
    zero it.
    """
    y = _check_y(y)
    if limit < 1:
        raise DomainError(f"limit must be >= 1, got {limit}")
    cap = DEFAULT_LIMITS.max_enumeration if cap is None else cap
    n_max = int(math.floor(limit))
    vals = np.ones(1, dtype=np.int64)
    mob = np.ones(1, dtype=np.int8)
    for p in _table_for(min(y, max(n_max, 2)), primes).upto(min(y, n_max)).tolist():
        new_v, new_m = [vals], [mob]
        pe, e = p, 1
        while pe <= n_max:
            keep = vals <= n_max // pe
            if not keep.any():
                break
            new_v.append(vals[keep] * pe)
            new_m.append(-mob[keep] if e == 1 else np.zeros(int(keep.sum()), dtype=np.int8))
            pe *= p
            e += 1
        vals = np.concatenate(new_v)
        mob = np.concatenate(new_m)
        if len(vals) > cap:
            raise ResourceError(f"smooth enumeration exceeds cap {cap} (y={y}, limit={limit})")
    order = np.argsort(vals, kind="stable")
    return SmoothEnumeration(y, float(limit), vals[order], mob[order])


def largest_prime_factor_sieve(n: int, primes: PrimeTable | None = None) -> np.ndarray:
    """lpf[m] = largest prime factor of m for 2 <= m <= n; lpf[0] = 0, lpf[1] = 1."""
    n = int(n)
    lpf = np.zeros(n + 1, dtype=np.int64)
    if n >= 1:
        lpf[1] = 1
    if n < 2:
        return lpf
    for p in _table_for(n, primes).upto(n).tolist():
        lpf[p::p] = p          # ascending p: the last writer is the largest prime factor
    return lpf


def _check_x(x: float, limits: Limits) -> int:
    if x < 0:
        raise DomainError(f"x must be >= 0, got {x}")
    if x > limits.max_x:
        raise ResourceError(f"x={x} exceeds cap {limits.max_x}")
    return int(math.floor(x))


def psi_exact(x: float, y: int, method: str = "enumerate", primes: PrimeTable | None = None,
              limits: Limits = DEFAULT_LIMITS) -> int:
    """Psi(x, y) = #{1 <= n <= x : every prime factor of n is <= y}."""
    y = _check_y(y)
    n = _check_x(x, limits)
    if method not in ("enumerate", "sieve"):
        raise DomainError(f"unknown method {method!r}")
    if n < 1:
        return 0
    if method == "enumerate":
        return len(enumerate_smooth(y, n, primes, cap=limits.max_enumeration))
    lpf = largest_prime_factor_sieve(n, primes)
    return int(np.count_nonzero(lpf[1:] <= y))


def psi_table(limit: float, y: int, method: str = "enumerate", primes: PrimeTable | None = None,
              limits: Limits = DEFAULT_LIMITS) -> np.ndarray:
    """counts[m] = Psi(m, y) for every integer 0 <= m <= limit, by either method."""
    y = _check_y(y)
    n = _check_x(limit, limits)
    ind = np.zeros(n + 1, dtype=np.int64)
    if method == "enumerate":
        if n >= 1:
            ind[enumerate_smooth(y, n, primes, cap=limits.max_enumeration).values] = 1
    elif method == "sieve":
        ind[1:] = largest_prime_factor_sieve(n, primes)[1:] <= y
    else:
        raise DomainError(f"unknown method {method!r}")
    return np.cumsum(ind)


# ---------------------------------------------------------------------------
# Rough numbers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RoughPrefixTable:
    """counts[m] = Phi(m, y) for 0 <= m <= limit."""

    y: int
    limit: int
    counts: np.ndarray

    def __call__(self, x):
        """Phi(x, y) for a scalar or array of nonnegative reals x <= limit."""
        m = np.floor(np.asarray(x, dtype=float)).astype(np.int64)
        if m.size and (m.max() > self.limit or m.min() < 0):
            raise DomainError(f"rough prefix table covers [0, {self.limit}]")
        out = self.counts[m]
        return int(out) if out.ndim == 0 else out


def build_rough_prefix(y: int, limit: int, primes: PrimeTable | None = None,
                       limits: Limits = DEFAULT_LIMITS) -> RoughPrefixTable:
    y = _check_y(y)
    limit = int(limit)
    if limit < 1:
        raise DomainError(f"limit must be >= 1, got {limit}")
    if limit > limits.max_x:
        raise ResourceError(f"rough prefix limit {limit} exceeds cap {limits.max_x}")
    rough = np.ones(limit + 1, dtype=bool)
    rough[0] = False
    for p in _table_for(min(y, max(limit, 2)), primes).upto(min(y, limit)).tolist():
        rough[p::p] = False
    dtype = np.int32 if limit < 2**31 - 1 else np.int64
    return RoughPrefixTable(y, limit, np.cumsum(rough, dtype=dtype))


def phi_exact(x: float, y: int, primes: PrimeTable | None = None,
              limits: Limits = DEFAULT_LIMITS) -> int:
    """Phi(x, y) = #{1 <= n <= x : every prime factor of n is > y}."""
    y = _check_y(y)
    n = _check_x(x, limits)
    if n < 1:
        return 0
    if n <= y:
        return 1
    return int(build_rough_prefix(y, n, primes, limits).counts[n])


# ---------------------------------------------------------------------------
# Harmonic sums over smooth numbers and the factorisation identity
# ---------------------------------------------------------------------------

def smooth_harmonic_below(y: int, threshold: float, primes: PrimeTable | None = None,
                          cap: int | None = None) -> float:
    """sum of 1/n over y-smooth n < threshold (strict).

    The complementary tail over n >= threshold is ``inv_pi_y`` minus this.
    """
    y = _check_y(y)
    if threshold < 1:
        raise DomainError(f"threshold must be >= 1, got {threshold}")
    vals = enumerate_smooth(y, threshold, primes, cap=cap).below(threshold)
    return math.fsum((1.0 / vals).tolist())


def factorization_identity_residual(x: float, y: int, primes: PrimeTable | None = None,
                                    limits: Limits = DEFAULT_LIMITS) -> int:
    """floor(x) minus sum over smooth n <= x of Phi(x/n, y); zero for every x >= 1.

    Uses integer arithmetic only: Phi(x/n) depends on floor(x) // n.
    """
    y = _check_y(y)
    n_floor = _check_x(x, limits)
    if n_floor < 1:
        raise DomainError(f"x must be >= 1, got {x}")
    smooth = enumerate_smooth(y, n_floor, primes, cap=limits.max_enumeration).values
    table = build_rough_prefix(y, n_floor, primes, limits)
    return n_floor - int(table.counts[n_floor // smooth].sum(dtype=np.int64))
