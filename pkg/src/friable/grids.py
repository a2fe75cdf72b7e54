"""Grid specifications: ``a:b:Nlin``, ``a:b:Nlog``, single values and lists."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError

_RANGE = re.compile(r"^\s*([^:]+):([^:]+):(\d+)(lin|log)\s*$")


def parse_values(spec: str) -> list[float]:
    """Expand a value spec.

    >>> parse_values("1:3:3lin")
    [1.0, 2.0, 3.0]
    >>> parse_values("2.5,7")
    [2.5, 7.0]
    """
    if spec is None or not str(spec).strip():
        raise DomainError("empty grid specification")
    m = _RANGE.match(str(spec))
    if m:
        try:
            a, b = float(m.group(1)), float(m.group(2))
        except ValueError as exc:
            raise DomainError(f"cannot parse range {spec!r}") from exc
        n, kind = int(m.group(3)), m.group(4)
        if n < 1:
            raise DomainError(f"range {spec!r} has no points")
        if not (math.isfinite(a) and math.isfinite(b)) or b < a:
            raise DomainError(f"invalid range {spec!r}")
        if n == 1:
            return [a]
        if kind == "lin":
            return np.linspace(a, b, n).tolist()
        if a <= 0:
            raise DomainError(f"log range needs a > 0, got {spec!r}")
        return np.geomspace(a, b, n).tolist()
    try:
        vals = [float(part) for part in str(spec).split(",") if part.strip()]
    except ValueError as exc:
        raise DomainError(f"cannot parse grid {spec!r}") from exc
    if not vals or not all(math.isfinite(v) for v in vals):
        raise DomainError(f"invalid grid {spec!r}")
    return vals


def parse_ints(spec: str) -> list[int]:
    vals = parse_values(spec)
    out = [int(round(v)) for v in vals]
    if any(abs(v - o) > 1e-9 for v, o in zip(vals, out)):
        raise DomainError(f"expected integers in {spec!r}")
    return out


def snapped_log_grid(a: float, b: float, n: int) -> list[float]:
    """n log-spaced points in [a, b], alternately snapped to integers and half-integers."""
    raw = np.geomspace(a, b, n)
    out = []
    for i, v in enumerate(raw.tolist()):
        s = float(round(v)) if i % 2 == 0 else math.floor(v) + 0.5
        out.append(min(max(s, a), b))
    return sorted(set(out))


@dataclass(frozen=True)
class Grid:
    """Cartesian product of x values and y values, in x-major order."""

    xs: tuple
    ys: tuple
    x_spec: str = ""

    @classmethod
    def make(cls, xs, ys, x_spec: str | None = None) -> "Grid":
        xs = tuple(float(v) for v in xs)
        ys = tuple(int(v) for v in ys)
        return cls(xs, ys, x_spec if x_spec is not None else ",".join(repr(v) for v in xs))

    def points(self) -> list[tuple[float, int]]:
        return [(x, y) for x in self.xs for y in self.ys]

    def describe(self) -> dict:
        return {"x_spec": self.x_spec, "y_list": list(self.ys)}
