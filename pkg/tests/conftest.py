from __future__ import annotations

import math

import pytest
from hypothesis import HealthCheck, settings

from friable import Context

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def ctx() -> Context:
    return Context()


def trial_factor_max(n: int) -> int:
    """Largest prime factor of n by trial division (1 for n = 1)."""
    best, p = 1, 2
    while p * p <= n:
        while n % p == 0:
            best, n = p, n // p
        p += 1
    return max(best, n) if n > 1 else best


def trial_factor_min(n: int) -> int:
    """Smallest prime factor of n (n itself when prime, 1 for n = 1)."""
    if n == 1:
        return 1
    for p in range(2, math.isqrt(n) + 1):
        if n % p == 0:
            return p
    return n


def brute_psi(x: float, y: int) -> int:
    return sum(1 for n in range(1, int(math.floor(x)) + 1) if trial_factor_max(n) <= y)


def brute_phi(x: float, y: int) -> int:
    return sum(1 for n in range(1, int(math.floor(x)) + 1) if n == 1 or trial_factor_min(n) > y)
