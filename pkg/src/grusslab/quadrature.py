"""Composite Gauss-Legendre quadrature with panel doubling.

Integrands are evaluated on a whole vector of nodes at once and must return
an array whose leading axis runs over the nodes; the trailing axes may hold
scalars, vectors of independent instances, or (stacks of) matrices.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, NamedTuple

import numpy as np

from .errors import NoConvergence
from .hermitian import hermitize

# Nodes per evaluation call; fixed so the summation order never depends on
# anything but the panel count.
_CHUNK_PANELS = 16


@dataclass(frozen=True)
class QuadratureConfig:
    nodes_per_panel: int = 16
    initial_panels: int = 4
    max_doublings: int = 12
    atol: float = 1e-11
    rtol: float = 1e-10

    def __post_init__(self):
        if min(self.nodes_per_panel, self.initial_panels, self.max_doublings) < 1:
            raise ValueError("quadrature counts must be positive")
        if self.atol <= 0 or self.rtol <= 0:
            raise ValueError("atol and rtol must be positive")


@dataclass(frozen=True)
class Integrand:
    """Vectorized integrand with optional values at removable endpoint singularities.

    ``evaluate(ts)`` maps a 1-D array of abscissae to values stacked along
    axis 0. Gauss-Legendre nodes are interior, so ``endpoint_values`` are
    only substituted for nodes lying within ``1e-14 * (hi - lo)`` of an end.
    """

    evaluate: Callable[[np.ndarray], np.ndarray]
    endpoint_values: tuple = (None, None)


class QuadResult(NamedTuple):
    value: np.ndarray
    error: np.ndarray
    panels: int


@lru_cache(maxsize=None)
def _legendre(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


def gauss_legendre(f, lo: float, hi: float, panels: int, nodes_per_panel: int = 16):
    """Fixed composite rule with ``panels`` equal panels."""
    f = f if isinstance(f, Integrand) else Integrand(f)
    x, w = _legendre(nodes_per_panel)
    width = (hi - lo) / panels
    eps = 1e-14 * (hi - lo)
    total = None
    for start in range(0, panels, _CHUNK_PANELS):
        idx = np.arange(start, min(panels, start + _CHUNK_PANELS))
        centers = lo + (idx + 0.5) * width
        ts = (centers[:, None] + 0.5 * width * x[None, :]).ravel()
        ws = np.tile(0.5 * width * w, idx.size)
        vals = np.asarray(f.evaluate(ts))
        lo_val, hi_val = f.endpoint_values
        if lo_val is not None:
            m = np.abs(ts - lo) < eps
            if m.any():
                vals = np.array(vals, copy=True)
                vals[m] = lo_val
        if hi_val is not None:
            m = np.abs(ts - hi) < eps
            if m.any():
                vals = np.array(vals, copy=True)
                vals[m] = hi_val
        part = np.tensordot(ws, vals, axes=(0, 0))
        total = part if total is None else total + part
    return total


def _instance_norm(x, batch_ndim: int):
    x = np.abs(np.asarray(x))
    if x.ndim <= batch_ndim:
        return x
    axes = tuple(range(batch_ndim, x.ndim))
    return np.sqrt(np.sum(x * x, axis=axes))


def integrate(
    f,
    lo: float,
    hi: float,
    cfg: QuadratureConfig | None = None,
    *,
    batch_ndim: int = 0,
    hermitian: bool = False,
) -> QuadResult:
    """Integrate ``f`` over ``[lo, hi]`` by panel doubling.

    Parameters
    ----------
    f : Integrand or callable
        Vectorized integrand.
    lo, hi : float
        Finite interval with ``lo < hi``.
    cfg : QuadratureConfig, optional
    batch_ndim : int
        Number of leading value axes holding independent instances. The
        difference between successive refinements is measured per instance
        (Frobenius norm over the remaining axes) and every instance must
        meet ``atol + rtol * ||value||``.
    hermitian : bool
        Symmetrize the last two axes of the result.

    Returns
    -------
    QuadResult
        ``value`` from the finer rule, ``error`` the per-instance difference
        to the coarser rule, and the final panel count.
    """
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    cfg = cfg or QuadratureConfig()
    panels = cfg.initial_panels
    prev = gauss_legendre(f, lo, hi, panels, cfg.nodes_per_panel)
    for _ in range(cfg.max_doublings):
        panels *= 2
        cur = gauss_legendre(f, lo, hi, panels, cfg.nodes_per_panel)
        err = _instance_norm(cur - prev, batch_ndim)
        size = _instance_norm(cur, batch_ndim)
        if not np.all(np.isfinite(cur)):
            raise NoConvergence("integrand produced non-finite values")
        if np.all(err <= cfg.atol + cfg.rtol * size):
            if hermitian:
                cur = hermitize(cur)
            return QuadResult(cur, err, panels)
        prev = cur
    raise NoConvergence(f"quadrature tolerance unmet after {cfg.max_doublings} doublings")
