"""Resource caps and numerical defaults.

Every cap can be overridden from the environment with the ``FRIABLE_``
prefix, e.g. ``FRIABLE_MAX_X=1e9``.  Values are read when a
:class:`Limits` object is created, not at import time.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace

ENV_PREFIX = "FRIABLE_"


def _env_number(name: str, default, kind):
    raw = os.environ.get(ENV_PREFIX + name.upper())
    if raw is None or raw == "":
        return default
    return kind(float(raw)) if kind is int else kind(raw)


@dataclass(frozen=True)
class Limits:
    max_x: int = 10**8                 # largest x for exact counts and sieves
    max_enumeration: int = 10**8       # largest smooth enumeration
    max_breakpoints: int = 10**6       # breakpoints per piecewise integral
    u_max: float = 50.0                # range of the rho / omega tables
    panel_degree: int = 24
    table_accuracy: float = 1e-12
    quad_order: int = 16
    quad_max_depth: int = 40

    @classmethod
    def from_env(cls, **overrides) -> "Limits":
        base = cls()
        values = {}
        for f in fields(cls):
            kind = int if isinstance(getattr(base, f.name), int) else float
            values[f.name] = _env_number(f.name, getattr(base, f.name), kind)
        values.update(overrides)
        return cls(**values)

    def with_values(self, **kw) -> "Limits":
        return replace(self, **kw)


DEFAULT_LIMITS = Limits()


def load_config_file(path: str) -> dict[str, str]:
    """Parse a ``key=value`` file; blank lines and ``#`` comments are skipped."""
    out: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key] = value
    return out


__all__ = ["ENV_PREFIX", "Limits", "DEFAULT_LIMITS", "load_config_file"]
