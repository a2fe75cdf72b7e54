"""Smooth and rough number counts, de Bruijn's approximants and their error terms.

The main entry points are re-exported here; see the submodules for details:

* :mod:`friable.arith` - exact counts Psi, Phi, Mertens data, smooth enumeration
* :mod:`friable.special` - Dickman rho, Buchstab omega, damped convolution tables
* :mod:`friable.approx` - Lambda, mu_y, V, V*, W
* :mod:`friable.error_terms` - Delta, Q, Q*, R, R*
* :mod:`friable.identities` - numerical checks of the exact identities
* :mod:`friable.bounds` - explicit bounds and implication audits
"""

from __future__ import annotations

__version__ = "0.1.0"

from .approx import lambda_approx, mu_y, v_approx, v_star_approx, w_approx
from .arith import mertens_data, phi_exact, pi_product, psi_exact
from .config import Limits
from .context import Context, default_context
from .error_terms import delta, q_error, q_star_error, r_error, r_star_error
from .exceptions import DomainError, FriableError, NumericalError, ResourceError
from .special import default_tables

__all__ = [
    "__version__", "Context", "default_context", "Limits", "default_tables",
    "psi_exact", "phi_exact", "pi_product", "mertens_data",
    "lambda_approx", "mu_y", "v_approx", "v_star_approx", "w_approx",
    "delta", "q_error", "q_star_error", "r_error", "r_star_error",
    "FriableError", "DomainError", "ResourceError", "NumericalError",
]
