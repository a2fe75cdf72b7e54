"""Dickman's rho, Buchstab's omega and related kernels as panel polynomials.

Definitions (standard; both functions are continuous for u > 1):

* rho(u) = 1 on [0, 1], rho(u) = 0 for u < 0, and u rho'(u) = -rho(u - 1)
  for u > 1.  rho' is taken right-continuous at u = 0 and u = 1, so
  rho'(1) = -1.
* omega(u) = 1/u on [1, 2], (u omega(u))' = omega(u - 1) for u > 2, and
  omega(u) = 0 for u < 1.  omega(u) -> e^{-gamma} as u -> infinity.

Both are stored as one Chebyshev expansion per unit panel [k, k+1].  The
panel for k is obtained from the panel for k - 1 by integrating the delay
equation: the integrand on [k, k+1] is a known function of the previous
panel evaluated at the same local coordinate, so each step is one
interpolation followed by an exact Chebyshev antiderivative.  For omega the
stored polynomial is u*omega(u); omega itself is that divided by u.

:class:`ExpConvolutionTable` tabulates

    h(u) = integral_{u0}^{u} phi(w) y^{-(u - w)} dw

for phi in {omega, rho', rho}.  With phi = omega this is mu_y(u); with
phi = rho' it is the kernel that turns de Bruijn's Lambda into a finite
sum; with phi = rho it gives the antiderivative-type quantity needed for
tail integrals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import chebyshev as C

from .arith import EXP_NEG_GAMMA
from .config import DEFAULT_LIMITS, Limits
from .exceptions import DomainError, NumericalError
from .quadrature import PiecewiseIntegrand, gauss_legendre, integrate_piecewise, interior_points


# ---------------------------------------------------------------------------
# Uniform Chebyshev panels
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChebPanels:
    """Panel i covers [start + i*width, start + (i+1)*width]."""

    start: float
    width: float
    coeffs: np.ndarray        # (n_panels, degree + 1)

    @property
    def stop(self) -> float:
        return self.start + self.width * self.coeffs.shape[0]

    def locate(self, x: np.ndarray):
        t = (x - self.start) / self.width
        idx = np.clip(np.floor(t).astype(np.int64), 0, self.coeffs.shape[0] - 1)
        return idx, 2.0 * (t - idx) - 1.0

    def __post_init__(self):
        object.__setattr__(self, "_columns", np.ascontiguousarray(self.coeffs.T))

    def __call__(self, x: np.ndarray) -> np.ndarray:
        idx, s = self.locate(np.asarray(x, dtype=float))
        return clenshaw(self.coeffs, idx, s, self._columns)

    def derivative(self) -> "ChebPanels":
        d = np.array([C.chebder(c) * (2.0 / self.width) for c in self.coeffs])
        return ChebPanels(self.start, self.width, d)


def clenshaw(coeffs: np.ndarray, idx: np.ndarray, s: np.ndarray,
             columns: np.ndarray | None = None) -> np.ndarray:
    """Evaluate sum_k coeffs[idx, k] T_k(s); ``columns`` is coeffs.T made contiguous."""
    cols = np.ascontiguousarray(coeffs.T) if columns is None else columns
    shape = np.shape(s)
    s = np.asarray(s, dtype=float).ravel()
    idx = np.asarray(idx).ravel()
    if cols.shape[0] == 1:
        return (cols[0].take(idx) + 0.0 * s).reshape(shape)
    two_s = 2.0 * s
    b1 = cols[-1].take(idx)
    b2 = np.zeros_like(s)
    tmp = np.empty_like(s)
    for k in range(cols.shape[0] - 2, 0, -1):
        np.multiply(two_s, b1, out=tmp)
        tmp -= b2
        tmp += cols[k].take(idx)
        b2, b1, tmp = b1, tmp, b2
    return (s * b1 - b2 + cols[0].take(idx)).reshape(shape)


def _cheb_nodes(n: int) -> np.ndarray:
    return C.chebpts1(n)


def _interp(values: np.ndarray) -> np.ndarray:
    """Chebyshev coefficients interpolating ``values`` given at chebpts1."""
    n = values.shape[-1]
    x = _cheb_nodes(n)
    return C.chebfit(x, values, n - 1) if values.ndim == 1 else np.array(
        [C.chebfit(x, v, n - 1) for v in values])


# ---------------------------------------------------------------------------
# Dickman and Buchstab tables
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpecialFunctionTable:
    kind: str                 # "dickman" or "buchstab"
    u_max: float
    panels: ChebPanels        # rho itself, or u*omega(u) for buchstab
    target_accuracy: float
    accuracy_estimate: float

    def _check(self, u: np.ndarray):
        if u.size and np.nanmax(u) > self.u_max:
            raise DomainError(f"u={np.nanmax(u)} beyond table range {self.u_max}")


def _build_panels(kind: str, n_panels: int, degree: int) -> np.ndarray:
    coeffs = np.zeros((n_panels, degree + 1))
    s = _cheb_nodes(degree)               # integrand interpolated at one degree less
    one = np.zeros(degree + 1)
    one[0] = 1.0
    if kind == "dickman":
        coeffs[0] = one
        first = 1
    else:
        if n_panels > 1:
            coeffs[1] = one                   # u*omega(u) = 1 on [1, 2]
        first = 2
    for k in range(first, n_panels):
        t = k + 0.5 * (s + 1.0)
        prev = C.chebval(s, coeffs[k - 1])
        if kind == "dickman":
            integrand = prev / t               # rho(t-1)/t
            sign = -1.0
        else:
            integrand = prev / (t - 1.0)       # omega(t-1) = g(t-1)/(t-1)
            sign = 1.0
        anti = 0.5 * C.chebint(C.chebfit(s, integrand, degree - 1), lbnd=-1)
        left = coeffs[k - 1].sum()             # value at s = +1 of the previous panel
        coeffs[k] = sign * anti
        coeffs[k, 0] += left
    return coeffs


def _build_table(kind: str, u_max: float, accuracy: float, limits: Limits):
    if u_max < 2:
        raise DomainError("u_max must be >= 2")
    if u_max > limits.u_max:
        raise DomainError(f"u_max={u_max} beyond configured maximum {limits.u_max}")
    if accuracy < 1e-14:
        raise DomainError("accuracy below 1e-14 is not attainable in double precision")
    n = int(math.ceil(u_max))
    deg = limits.panel_degree
    coeffs = _build_panels(kind, n, deg)
    reference = _build_panels(kind, n, 2 * deg)
    probe = np.linspace(-1.0, 1.0, 65)
    diff = max(float(np.max(np.abs(C.chebval(probe, a) - C.chebval(probe, b))))
               for a, b in zip(coeffs, reference))
    if diff > accuracy:
        raise NumericalError(f"{kind} table reaches only {diff:.3g}, asked {accuracy:.3g}")
    return SpecialFunctionTable(kind, float(u_max), ChebPanels(0.0, 1.0, coeffs), accuracy, diff)


def build_dickman(u_max: float = 50.0, accuracy: float = 1e-12,
                  limits: Limits = DEFAULT_LIMITS) -> SpecialFunctionTable:
    return _build_table("dickman", u_max, accuracy, limits)


def build_buchstab(u_max: float = 50.0, accuracy: float = 1e-12,
                   limits: Limits = DEFAULT_LIMITS) -> SpecialFunctionTable:
    return _build_table("buchstab", u_max, accuracy, limits)


def _as_array(u):
    arr = np.asarray(u, dtype=float)
    return arr, arr.ndim == 0


def _out(arr, scalar):
    return float(arr) if scalar else arr


def rho(u, table: SpecialFunctionTable):
    u, scalar = _as_array(u)
    table._check(u)
    out = np.where(u < 0, 0.0, table.panels(np.maximum(u, 0.0)))
    return _out(out, scalar)


def rho_prime(u, table: SpecialFunctionTable):
    """-rho(u-1)/u for u >= 1, else 0 (right-continuous at 0 and 1)."""
    u, scalar = _as_array(u)
    table._check(u)
    big = u >= 1.0
    out = np.zeros_like(u)
    if np.any(big):
        ub = u[big]
        out[big] = -table.panels(ub - 1.0) / ub
    return _out(out, scalar)


def omega(u, table: SpecialFunctionTable):
    u, scalar = _as_array(u)
    table._check(u)
    out = np.where(u < 1.0, 0.0, table.panels(np.maximum(u, 1.0)) / np.maximum(u, 1.0))
    return _out(out, scalar)


def omega_minus_egamma(u, table: SpecialFunctionTable):
    """omega(u) - e^{-gamma}; equals -e^{-gamma} for u < 1."""
    u, scalar = _as_array(u)
    table._check(u)
    out = np.where(u < 1.0, 0.0, table.panels(np.maximum(u, 1.0)) / np.maximum(u, 1.0)) - EXP_NEG_GAMMA
    return _out(out, scalar)


def u_omega_prime(u, table: SpecialFunctionTable):
    """d/du (u omega(u)) from the panel polynomial (for u > 1, off the joints)."""
    u, scalar = _as_array(u)
    table._check(u)
    out = np.where(u < 1.0, 0.0, table.panels.derivative()(np.maximum(u, 1.0)))
    return _out(out, scalar)


@dataclass(frozen=True)
class Tables:
    """The pair of global tables every evaluation needs."""

    dickman: SpecialFunctionTable
    buchstab: SpecialFunctionTable

    @property
    def u_max(self) -> float:
        return min(self.dickman.u_max, self.buchstab.u_max)

    def rho(self, u):
        return rho(u, self.dickman)

    def rho_prime(self, u):
        return rho_prime(u, self.dickman)

    def omega(self, u):
        return omega(u, self.buchstab)

    def omega_minus_egamma(self, u):
        return omega_minus_egamma(u, self.buchstab)


_DEFAULT_TABLES: dict[tuple, Tables] = {}


def default_tables(limits: Limits = DEFAULT_LIMITS) -> Tables:
    key = (limits.u_max, limits.panel_degree, limits.table_accuracy)
    if key not in _DEFAULT_TABLES:
        _DEFAULT_TABLES[key] = Tables(
            build_dickman(limits.u_max, limits.table_accuracy, limits),
            build_buchstab(limits.u_max, limits.table_accuracy, limits))
    return _DEFAULT_TABLES[key]


# ---------------------------------------------------------------------------
# Convolution identity rho(u) + int_0^u rho(v) omega(u - v) dv = 1
# ---------------------------------------------------------------------------

def dickman_buchstab_convolution_residual(u: float, tables: Tables, tol: float = 1e-13) -> float:
    if u < 0 or u > tables.u_max:
        raise DomainError(f"u={u} outside [0, {tables.u_max}]")
    lo, hi = 0.0, u - 1.0              # omega(u - v) vanishes for v > u - 1
    integral = 0.0
    if hi > lo:
        joints = [u - j for j in range(2, int(u) + 1)] + list(range(1, int(u) + 1))
        bps = interior_points(joints, lo, hi)
        f = PiecewiseIntegrand.smooth(lo, hi, bps, lambda v: tables.rho(v) * tables.omega(u - v))
        integral = integrate_piecewise(f, gauss_legendre(16), tol)
    return tables.rho(u) + integral - 1.0


# ---------------------------------------------------------------------------
# Exponentially damped convolutions h(u) = int_{u0}^u phi(w) y^{-(u-w)} dw
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExpConvolutionTable:
    """h(u) for u in [u0, u_max], 0 below u0, plus its antiderivative from u0."""

    kernel: str
    y: float
    u0: float
    u_max: float
    values: ChebPanels
    antiderivative: ChebPanels

    def __call__(self, u):
        u, scalar = _as_array(u)
        if u.size and np.nanmax(u) > self.u_max:
            raise DomainError(f"u={np.nanmax(u)} beyond {self.kernel} table range {self.u_max}")
        out = np.where(u <= self.u0, 0.0, self.values(np.maximum(u, self.u0)))
        return _out(out, scalar)

    def integral(self, u):
        """int_{u0}^{u} h(s) ds (0 for u <= u0)."""
        u, scalar = _as_array(u)
        if u.size and np.nanmax(u) > self.u_max:
            raise DomainError(f"u={np.nanmax(u)} beyond {self.kernel} table range {self.u_max}")
        out = np.where(u <= self.u0, 0.0, self.antiderivative(np.maximum(u, self.u0)))
        return _out(out, scalar)


_KERNELS = {"omega": 1.0, "rho_prime": 1.0, "rho": 0.0}


def build_exp_convolution(kernel: str, y: float, tables: Tables, u_max: float | None = None,
                          subpanels: int = 8, degree: int = 16,
                          quad_order: int = 24) -> ExpConvolutionTable:
    """Tabulate h(u) = int_{u0}^u phi(w) y^{-(u-w)} dw on sub-panels of width 1/subpanels.

    On a sub-panel [a, b] inside one unit panel of phi,
    h(u) = y^{-(u-a)} h(a) + int_a^u phi(w) y^{-(u-w)} dw, with the integral
    done by Gauss-Legendre (phi is analytic there); the carry h(b) is
    computed directly, not read back from the interpolant.
    """
    if kernel not in _KERNELS:
        raise ValueError(f"unknown kernel {kernel!r}")
    if y <= 1:
        raise DomainError("y must exceed 1")
    phi = {"omega": tables.omega, "rho_prime": tables.rho_prime, "rho": tables.rho}[kernel]
    u0 = _KERNELS[kernel]
    u_max = tables.u_max if u_max is None else min(u_max, tables.u_max)
    width = 1.0 / subpanels
    n_panels = int(math.ceil((u_max - u0) / width - 1e-12))
    log_y = math.log(y)
    s = _cheb_nodes(degree + 1)
    gx, gw = gauss_legendre(quad_order).nodes, gauss_legendre(quad_order).weights

    a = u0 + width * np.arange(n_panels)
    # Chebyshev sample points (and the right end, for the carry) of every sub-panel
    targets = np.concatenate([a[:, None] + 0.5 * width * (s[None, :] + 1.0),
                              (a + width)[:, None]], axis=1)
    half = 0.5 * (targets - a[:, None])
    w = (a[:, None] + half)[..., None] + half[..., None] * gx
    vals = phi(w.ravel()).reshape(w.shape) * np.exp(-log_y * (targets[..., None] - w))
    partial = half * (vals @ gw)                      # int_a^target phi(w) y^{-(target-w)} dw
    decay = np.exp(-log_y * (targets - a[:, None]))
    panel_vals = np.empty_like(partial)
    carry = 0.0
    for i in range(n_panels):
        panel_vals[i] = decay[i] * carry + partial[i]
        carry = panel_vals[i, -1]
    coeffs = _interp(panel_vals[:, :-1])
    anti = np.array([0.5 * width * C.chebint(c, lbnd=-1) for c in coeffs])
    anti[:, 0] += np.concatenate(([0.0], np.cumsum(anti.sum(axis=1))[:-1]))
    return ExpConvolutionTable(kernel, float(y), u0, u0 + width * n_panels,
                               ChebPanels(u0, width, coeffs), ChebPanels(u0, width, anti))
