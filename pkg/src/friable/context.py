"""Lazily built, shared tables for a family of (x, y) evaluations.

A :class:`Context` owns the global rho/omega tables and, per y, the
Mertens data, smooth enumerations, rough-count prefix tables, Psi prefix
counts and the exponential-convolution kernels.  Tables only grow: a
request beyond the cached limit rebuilds to at least twice the old size.
Everything handed out is treated as read-only.
"""

from __future__ import annotations

import functools
import math
import threading

import numpy as np

from . import arith
from .arith import MertensData, PrimeTable, RoughPrefixTable, SmoothEnumeration
from .config import Limits
from .exceptions import ResourceError
from .special import ExpConvolutionTable, Tables, build_exp_convolution, default_tables


LARGE_Y = 1000      # above this, Psi comes from the lpf sieve instead of enumeration


class TrivialBoundsMonitor:
    """Running check of 0 <= Psi <= floor(x) and -{x} <= Lambda <= floor(x).

    Every Psi/Lambda pair computed through a context is fed here; the
    comparison allows ``rel_tol * x`` of floating-point slack on Lambda.
    """

    rel_tol = 1e-9

    def __init__(self):
        self.checked = 0
        self.violations: list[tuple[float, int, float, float]] = []
        self._lock = threading.Lock()

    def record(self, x, y: int, psi, lam) -> None:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        psi = np.broadcast_to(np.asarray(psi, dtype=float), x.shape)
        lam = np.broadcast_to(np.asarray(lam, dtype=float), x.shape)
        fl = np.floor(x)
        slack = self.rel_tol * x
        bad = (psi < 0) | (psi > fl) | (lam < -(x - fl) - slack) | (lam > fl + slack)
        with self._lock:
            self.checked += x.size
            for i in np.flatnonzero(bad)[:100].tolist():
                self.violations.append((float(x[i]), y, float(psi[i]), float(lam[i])))


def _locked(method):
    @functools.wraps(method)
    def wrapper(self, *args, **kwargs):
        with self._lock:
            return method(self, *args, **kwargs)
    return wrapper


class Context:
    """Shared caches; safe to use from several threads (builders hold a lock)."""

    def __init__(self, limits: Limits | None = None, tables: Tables | None = None):
        self.limits = limits or Limits.from_env()
        self.tables = tables or default_tables(self.limits)
        self._primes: PrimeTable | None = None
        self._mertens: dict[int, MertensData] = {}
        self._smooth: dict[int, SmoothEnumeration] = {}
        self._rough: dict[int, RoughPrefixTable] = {}
        self._psi: dict[int, np.ndarray] = {}
        self._lpf: np.ndarray | None = None
        self._kernels: dict[tuple[str, int], ExpConvolutionTable] = {}
        self.monitor = TrivialBoundsMonitor()
        self._lock = threading.RLock()

    # -- primes and Mertens ---------------------------------------------------
    @_locked
    def primes(self, limit: float) -> PrimeTable:
        if self._primes is None or self._primes.limit < limit:
            need = max(int(limit), 2**16, 2 * (self._primes.limit if self._primes else 0))
            self._primes = arith.sieve_primes(need)
        return self._primes

    @_locked
    def mertens(self, y: int) -> MertensData:
        if y not in self._mertens:
            self._mertens[y] = arith.mertens_data(y, self.primes(y))
        return self._mertens[y]

    # -- growth helper --------------------------------------------------------
    def _grow(self, old: float, need: float) -> int:
        need = int(math.floor(need))
        if need > self.limits.max_x:
            raise ResourceError(f"table limit {need} exceeds cap {self.limits.max_x}")
        return min(max(need, int(2 * old), 64), self.limits.max_x)

    @_locked
    def smooth(self, y: int, limit: float) -> SmoothEnumeration:
        cur = self._smooth.get(y)
        if cur is None or cur.limit < limit:
            new = self._grow(cur.limit if cur else 0, max(limit, 1))
            cur = arith.enumerate_smooth(y, new, self.primes(y), cap=self.limits.max_enumeration)
            self._smooth[y] = cur
        return cur

    @_locked
    def rough(self, y: int, limit: float) -> RoughPrefixTable:
        cur = self._rough.get(y)
        if cur is None or cur.limit < limit:
            new = self._grow(cur.limit if cur else 0, max(limit, 1))
            cur = arith.build_rough_prefix(y, new, self.primes(y), self.limits)
            self._rough[y] = cur
        return cur

    @_locked
    def lpf(self, limit: float) -> np.ndarray:
        """Largest-prime-factor sieve reaching at least ``limit``."""
        if self._lpf is None or self._lpf.size - 1 < limit:
            new = self._grow(self._lpf.size - 1 if self._lpf is not None else 0, max(limit, 2))
            self._lpf = arith.largest_prime_factor_sieve(new, self.primes(new))
        return self._lpf

    @_locked
    def psi_counts(self, y: int, limit: float) -> np.ndarray:
        """counts[m] = Psi(m, y) for 0 <= m <= len(counts) - 1 (at least ``limit``).

        Small y: from the smooth enumeration; large y (many primes, dense
        smooth set): from the largest-prime-factor sieve.
        """
        cur = self._psi.get(y)
        if cur is None or cur.size - 1 < limit:
            new = self._grow(cur.size - 1 if cur is not None else 0, max(limit, 1))
            if y <= LARGE_Y:
                enum = self.smooth(y, new)
                ind = np.zeros(new + 1, dtype=np.int64)
                ind[enum.values[: enum.count(new)]] = 1
            else:
                ind = (self.lpf(new)[: new + 1] <= y).astype(np.int64)
                ind[0] = 0
            cur = np.cumsum(ind)
            self._psi[y] = cur
        return cur

    def psi(self, x: float, y: int) -> int:
        """Psi(x, y), choosing enumeration or sieve by the size of y."""
        y = arith._check_y(y)
        if x < 1:
            return 0
        n = int(math.floor(x))
        if y <= LARGE_Y:
            return arith.psi_exact(n, y, "enumerate", self.primes(y), self.limits)
        return int(np.count_nonzero(self.lpf(n)[1: n + 1] <= y))

    @_locked
    def kernel(self, name: str, y: int) -> ExpConvolutionTable:
        key = (name, y)
        if key not in self._kernels:
            self._kernels[key] = build_exp_convolution(name, y, self.tables)
        return self._kernels[key]

    def mu_table(self, y: int) -> ExpConvolutionTable:
        return self.kernel("omega", y)


_DEFAULT: Context | None = None


def default_context() -> Context:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = Context()
    return _DEFAULT
