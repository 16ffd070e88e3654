"""Named family of non-decreasing weight functions ``g``."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np


class WeightKind(enum.Enum):
    IDENTITY = "identity"
    AFFINE = "affine"
    POWER = "power"
    EXP = "exp"


#: Intervals the refinement theorems integrate over.
DOMAINS = {
    "unit": (0.0, 1.0),
    "upper_half": (0.5, 1.0),
    "negative_unit": (-1.0, 0.0),
}

GRID_POINTS = 1024


@dataclass(frozen=True)
class MonotoneWeight:
    """Weight ``g`` on ``[lo, hi]``.

    IDENTITY is ``t``, AFFINE is ``2t``, POWER is ``t**k`` and EXP is
    ``e**t``. Construction checks monotonicity on a 1024-point grid and
    requires ``g(hi) > g(lo)``; pass ``check=False`` to build degenerate
    weights (e.g. ``t**0``) for the base inequalities.
    """

    kind: WeightKind
    lo: float = 0.0
    hi: float = 1.0
    k: float = 3.0
    check: bool = True

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError("weight domain must have lo < hi")
        if self.kind is WeightKind.POWER and self.k < 0:
            raise ValueError("power weight needs k >= 0")
        if self.check:
            if self.kind is WeightKind.POWER and self.k == 0:
                raise ValueError("t**0 is constant; use check=False")
            grid = self(np.linspace(self.lo, self.hi, GRID_POINTS))
            if not np.all(np.isfinite(grid)):
                raise ValueError(f"{self.name} is undefined on [{self.lo}, {self.hi}]")
            if np.any(np.diff(grid) < 0):
                raise ValueError(f"{self.name} is not non-decreasing on [{self.lo}, {self.hi}]")
            if not self.g_hi > self.g_lo:
                raise ValueError(f"{self.name} has g(hi) == g(lo)")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind is WeightKind.IDENTITY:
            return t
        if self.kind is WeightKind.AFFINE:
            return 2.0 * t
        if self.kind is WeightKind.POWER:
            with np.errstate(invalid="ignore"):
                return np.power(t, self.k)
        return np.exp(t)

    @property
    def g_lo(self) -> float:
        return float(self(self.lo))

    @property
    def g_hi(self) -> float:
        return float(self(self.hi))

    @property
    def spread(self) -> float:
        """``g(hi) - g(lo)``."""
        return self.g_hi - self.g_lo

    @property
    def name(self) -> str:
        if self.kind is WeightKind.POWER:
            return f"power{self.k:g}"
        return self.kind.value

    def on(self, lo: float, hi: float) -> "MonotoneWeight":
        return MonotoneWeight(self.kind, lo, hi, self.k, self.check)


def weight(name: str, lo: float = 0.0, hi: float = 1.0) -> MonotoneWeight:
    """Build a weight from a CLI-style name: identity, affine, exp, power or powerK."""
    name = name.strip().lower()
    if name.startswith("power"):
        k = float(name[5:]) if len(name) > 5 else 3.0
        return MonotoneWeight(WeightKind.POWER, lo, hi, k)
    return MonotoneWeight(WeightKind(name), lo, hi)


ALL_WEIGHT_NAMES = ("identity", "affine", "power", "exp")
