"""Scalar two-variable means and deformed logarithms.

All functions broadcast over numpy arrays. Removable singularities
(``a == b`` for the logarithmic mean, ``s -> 0`` for the deformed logarithm,
``t -> 0`` for the power mean) switch to second-order Taylor expansions
once the small parameter drops below :data:`TAYLOR_CUTOFF`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import NonPositiveInput

TAYLOR_CUTOFF = 1e-6


class MeanKind(enum.Enum):
    ARITH = "arith"
    GEOM = "geom"
    HARM = "harm"
    HERON = "heron"
    HEINZ = "heinz"
    POWER = "power"


@dataclass(frozen=True)
class MeanParams:
    """Interpolation parameter ``t`` in [-1, 1] and weight ``v`` in [0, 1]."""

    t: float = 0.5
    v: float = 0.5

    def __post_init__(self):
        if not -1.0 <= self.t <= 1.0:
            raise ValueError(f"t={self.t} outside [-1, 1]")
        if not 0.0 <= self.v <= 1.0:
            raise ValueError(f"v={self.v} outside [0, 1]")


def _positive(*xs):
    out = []
    for x in xs:
        x = np.asarray(x, dtype=float)
        if np.any(~(x > 0)):
            raise NonPositiveInput("inputs must be strictly positive")
        out.append(x)
    return out


def _ret(x):
    return float(x) if np.ndim(x) == 0 else x


def arith(a, b, v=0.5):
    """Weighted arithmetic mean ``(1 - v) a + v b``."""
    a, b = _positive(a, b)
    return _ret((1.0 - v) * a + v * b)


def geom(a, b, v=0.5):
    """Weighted geometric mean ``a^(1-v) b^v``, evaluated as ``a exp(v ln(b/a))``."""
    a, b = _positive(a, b)
    return _ret(a * np.exp(v * np.log(b / a)))


def harm(a, b, v=0.5):
    a, b = _positive(a, b)
    return _ret(1.0 / ((1.0 - v) / a + v / b))


def heron(a, b, t, v=0.5):
    """``F_{t,v}(a, b) = (1 - t) (a #_v b) + t (a nabla_v b)`` for t in [0, 1]."""
    return _ret((1.0 - np.asarray(t)) * geom(a, b, v) + np.asarray(t) * arith(a, b, v))


def heinz(a, b, t):
    """``H_t(a, b) = (a #_t b + b #_t a) / 2``."""
    a, b = _positive(a, b)
    u = np.log(b / a)
    return _ret(0.5 * a * (np.exp(t * u) + np.exp((1.0 - np.asarray(t)) * u)))


def power_mean(a, b, t, v=0.5):
    """``a ((1 - v) + v (b/a)^t)^(1/t)``, with the geometric mean at ``t = 0``.

    Evaluated as ``a exp(log1p(v expm1(t u)) / t)`` with ``u = ln(b/a)``; for
    ``|t| < TAYLOR_CUTOFF`` the exponent uses the cumulant expansion
    ``v u + t v(1-v) u^2 / 2 + t^2 v(1-v)(1-2v) u^3 / 6``.
    """
    a, b = _positive(a, b)
    t = np.asarray(t, dtype=float)
    v = np.asarray(v, dtype=float)
    u = np.log(b / a)
    small = np.abs(t) < TAYLOR_CUTOFF
    ts = np.where(small, 1.0, t)
    with np.errstate(over="ignore", invalid="ignore"):
        direct = np.log1p(v * np.expm1(ts * u)) / ts
    w = v * (1.0 - v)
    series = v * u + t * w * u**2 / 2.0 + t**2 * w * (1.0 - 2.0 * v) * u**3 / 6.0
    return _ret(a * np.exp(np.where(small, series, direct)))


def scalar_mean(kind: MeanKind, a, b, params: MeanParams = MeanParams()):
    """Dispatch on :class:`MeanKind`.

    ARITH/GEOM/HARM use ``params.v`` only, HEINZ uses ``params.t`` only
    (which must lie in [0, 1], as for HERON).
    """
    t, v = params.t, params.v
    if kind is MeanKind.ARITH:
        return arith(a, b, v)
    if kind is MeanKind.GEOM:
        return geom(a, b, v)
    if kind is MeanKind.HARM:
        return harm(a, b, v)
    if kind in (MeanKind.HERON, MeanKind.HEINZ) and t < 0:
        raise ValueError(f"{kind.name} requires t in [0, 1]")
    if kind is MeanKind.HERON:
        return heron(a, b, t, v)
    if kind is MeanKind.HEINZ:
        return heinz(a, b, t)
    if kind is MeanKind.POWER:
        return power_mean(a, b, t, v)
    raise ValueError(f"unknown mean kind {kind!r}")


def log_mean(a, b):
    """Logarithmic mean ``(b - a) / (ln b - ln a)``, equal to ``a`` when ``a == b``."""
    a, b = _positive(a, b)
    u = np.log(b / a)
    small = np.abs(u) < TAYLOR_CUTOFF
    us = np.where(small, 1.0, u)
    return _ret(a * np.where(small, 1.0 + u / 2.0 + u * u / 6.0, np.expm1(us) / us))


def deformed_log(s, x):
    """``ln_s x = (x^s - 1) / s``; ``ln x`` at ``s = 0``."""
    (x,) = _positive(x)
    s = np.asarray(s, dtype=float)
    if np.any((s < 0) | (s > 1)):
        raise ValueError("s must lie in [0, 1]")
    L = np.log(x)
    small = s < TAYLOR_CUTOFF
    ss = np.where(small, 1.0, s)
    series = L + s * L * L / 2.0 + s * s * L**3 / 6.0
    return _ret(np.where(small, series, np.expm1(ss * L) / ss))


def gamma_factor(a, b):
    """``ln^2(b/a) / (2 (ln^2(b/a) + 4))``, in [0, 1/2)."""
    a, b = _positive(a, b)
    L2 = np.log(b / a) ** 2
    return _ret(L2 / (2.0 * (L2 + 4.0)))
