"""Scalar refinement checks: Grüss/Čebyšev base, AM-GM refinements, two comparison bounds (EQ6_EQ7).

The batched kernel :func:`scalar_terms` evaluates a whole array of
``(a, b, v)`` instances at once and is what the sweeps use;
:func:`check_scalar_refinement` wraps a single instance into an
:class:`~grusslab.report.InequalityReport`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import means
from .quadrature import QuadratureConfig, integrate
from .report import InequalityReport
from .weights import MonotoneWeight, WeightKind

#: Scalar tolerance ``REL_TOL * (1 + |rhs|)``, before adding quadrature error.
REL_TOL = 1e-10

SCALAR_SUITES = ("THM1", "CHAIN", "THM2", "COR3", "COR_GAMMA")
#: Scalar forms of the operator theorems, used by the commuting-pair oracle.
SCALAR_COUNTERPARTS = ("POWER_AG", "POWER_HG", "ENTROPY")

SUITE_DOMAIN = {
    "THM1": (0.0, 1.0),
    "CHAIN": (0.0, 1.0),
    "THM2": (0.5, 1.0),
    "POWER_AG": (0.0, 1.0),
    "POWER_HG": (-1.0, 0.0),
    "ENTROPY": (0.0, 1.0),
}

# COR3 switches to its Taylor series for |ln x| below this.
_COR3_SERIES_CUTOFF = 0.1
_COR3_SERIES = (0.0, 0.0, 1 / 96, 1 / 192, 17 / 11520, 7 / 23040, 43 / 860160,
                107 / 15482880, 769 / 928972800, 163 / 1857945600)
# Series cutoff for the normalized difference of the two comparison bounds.
_EQ67_CUTOFF = 1e-4


def _require_domain(suite: str, g: MonotoneWeight):
    dom = SUITE_DOMAIN[suite]
    if (g.lo, g.hi) != dom:
        raise ValueError(f"{suite} needs a weight on {list(dom)}, got [{g.lo}, {g.hi}]")


def _quad_batch(fn, lo, hi, cfg, batch_ndim=1):
    return integrate(fn, lo, hi, cfg, batch_ndim=batch_ndim)


def _weight_integral(g: MonotoneWeight, cfg):
    r = integrate(lambda ts: g(ts), g.lo, g.hi, cfg)
    return float(r.value), float(r.error)


def cor3_refinement(x):
    """Refinement term of the g(t) = t corollary, ``4/ln^2 x (...)``, cancellation free.

    Uses ``(x + 1)/2 - sqrt(x) = 2 sqrt(x) sinh^2(u/4)`` with ``u = ln x``.
    For ``|u| < 0.1`` the bracket cancels to order ``u^4``, so the Taylor
    series (through ``u^9``) is used instead; it starts ``u^2/96 + u^3/192``.
    """
    x = np.asarray(x, dtype=float)
    u = np.log(x)
    small = np.abs(u) < _COR3_SERIES_CUTOFF
    us = np.where(small, 1.0, u)
    bracket = us * np.expm1(us) / 8.0 - 2.0 * np.exp(us / 2.0) * np.sinh(us / 4.0) ** 2
    series = np.polynomial.polynomial.polyval(u, _COR3_SERIES)
    return np.where(small, series, 4.0 * bracket / us**2)


def scalar_terms(suite: str, a, b, v=0.5, g: MonotoneWeight | None = None,
                 cfg: QuadratureConfig | None = None, s: float = 1.0) -> dict:
    """Evaluate one scalar suite on arrays of instances.

    Returns a dict of arrays (broadcast shape of ``a, b, v``): ``lhs`` (the
    refined lower bound), ``rhs``, ``unrefined``, ``gain = lhs - unrefined``,
    ``quad_error``, ``tol``, ``margin = rhs - lhs`` and ``holds``. CHAIN
    adds its three link margins. COR3 is evaluated at ``x = b / a``.
    ``s`` is the entropy order for the ENTROPY counterpart.
    """
    a, b, v = np.broadcast_arrays(*(np.asarray(z, dtype=float) for z in (a, b, v)))
    shape = a.shape
    a, b, v = a.ravel(), b.ravel(), v.ravel()
    means._positive(a, b)
    cfg = cfg or QuadratureConfig()
    out: dict = {}
    qerr = np.zeros_like(a)

    if suite in SUITE_DOMAIN:
        if suite == "ENTROPY":
            g = MonotoneWeight(WeightKind.AFFINE, 0.0, 1.0)
        if g is None:
            raise ValueError(f"{suite} needs a weight function")
        _require_domain(suite, g)
        spread = g.spread
        ig, ig_err = _weight_integral(g, cfg)

    if suite == "THM1":
        geo, ari = means.geom(a, b, v), means.arith(a, b, v)
        half = 0.5 * (geo + ari)
        r = _quad_batch(lambda ts: ((1 - ts[:, None]) * geo + ts[:, None] * ari - half) * g(ts)[:, None],
                        0.0, 1.0, cfg)
        coef = 4.0 / spread
        unrefined, rhs = geo, ari
        lhs = geo + coef * r.value
        qerr = coef * r.error
    elif suite == "CHAIN":
        geo, ari = np.sqrt(a * b), 0.5 * (a + b)
        half = 0.5 * (geo + ari)
        r = _quad_batch(lambda ts: ((1 - ts[:, None]) * geo + ts[:, None] * ari) * g(ts)[:, None],
                        0.0, 1.0, cfg)
        mid = r.value / ig
        qerr = (r.error + np.abs(mid) * ig_err) / abs(ig)
        unrefined, lhs, rhs = half, mid, ari
        out["link_margins"] = np.stack([half - geo, mid - half, ari - mid])
    elif suite == "THM2":
        geo, ari = np.sqrt(a * b), 0.5 * (a + b)
        u = np.log(b / a)
        L = means.log_mean(a, b)
        r = _quad_batch(lambda ts: g(ts)[:, None] * 0.5 * a * (np.exp(ts[:, None] * u) + np.exp((1 - ts[:, None]) * u)),
                        0.5, 1.0, cfg)
        coef = 2.0 / spread
        unrefined, rhs = geo, ari
        lhs = geo + coef * (r.value - L * ig)
        qerr = coef * (r.error + L * ig_err)
    elif suite == "COR3":
        x = b / a
        unrefined = np.sqrt(x)
        lhs = unrefined + cor3_refinement(x)
        rhs = 0.5 * (1.0 + x)
    elif suite == "COR_GAMMA":
        geo, ari = np.sqrt(a * b), 0.5 * (a + b)
        unrefined, rhs = geo, ari
        lhs = geo + means.gamma_factor(a, b) * means.log_mean(a, b)
    elif suite in ("POWER_AG", "POWER_HG"):
        lo, hi = SUITE_DOMAIN[suite]
        f = lambda ts: means.power_mean(a, b, ts[:, None], v)
        r1 = _quad_batch(lambda ts: f(ts) * g(ts)[:, None], lo, hi, cfg)
        r2 = _quad_batch(f, lo, hi, cfg)
        coef = 4.0 / spread
        geo = means.geom(a, b, v)
        if suite == "POWER_AG":
            unrefined, rhs = geo, means.arith(a, b, v)
        else:
            unrefined, rhs = means.harm(a, b, v), geo
        lhs = unrefined + coef * (r1.value - r2.value * ig)
        qerr = coef * (r1.error + r2.error * abs(ig) + np.abs(r2.value) * ig_err)
    elif suite == "ENTROPY":
        if not 0.0 < s <= 1.0:
            raise ValueError("entropy order s must lie in (0, 1]")
        x = b / a
        logx = np.log(x)
        r = _quad_batch(lambda ts: (2 * ts[:, None] - 1) * a * means.deformed_log(s * ts[:, None], x),
                        0.0, 1.0, cfg)
        unrefined = a * logx
        lhs = unrefined + 2.0 * r.value
        rhs = a * means.deformed_log(s, x)
        qerr = 2.0 * r.error
    else:
        raise ValueError(f"unknown scalar suite {suite!r}")

    tol = REL_TOL * (1.0 + np.abs(rhs)) + qerr
    margin = rhs - lhs
    if suite == "CHAIN":
        margin = np.min(out["link_margins"], axis=0)
        out["link_margins"] = out["link_margins"].reshape((3,) + shape)
    out.update(
        lhs=lhs.reshape(shape), rhs=rhs.reshape(shape), unrefined=unrefined.reshape(shape),
        gain=(lhs - unrefined).reshape(shape), quad_error=qerr.reshape(shape),
        tol=tol.reshape(shape), margin=margin.reshape(shape),
        holds=(margin >= -tol).reshape(shape),
    )
    return out


def check_scalar_refinement(suite: str, a: float, b: float, v: float = 0.5,
                            g: MonotoneWeight | None = None,
                            cfg: QuadratureConfig | None = None, s: float = 1.0) -> InequalityReport:
    """Check one refinement inequality at a single ``(a, b, v)``."""
    if suite in ("THM1", "POWER_AG", "POWER_HG") and not 0.0 <= v <= 1.0:
        raise ValueError("v must lie in [0, 1]")
    r = scalar_terms(suite, a, b, v, g, cfg, s)
    gain = float(r["gain"])
    tol = float(r["tol"])
    details = {"unrefined": float(r["unrefined"]), "gain_nonnegative": gain >= -tol}
    if "link_margins" in r:
        details["link_margins"] = [float(m) for m in r["link_margins"]]
    inputs = {"a": a, "b": b, "v": v, "weight": g.name if g is not None else None}
    if suite == "ENTROPY":
        inputs["s"] = s
    return InequalityReport(
        suite_id=suite, inputs=inputs, lhs=float(r["lhs"]), rhs=float(r["rhs"]),
        margin=float(r["margin"]), tol=tol, refinement_gain=gain,
        quadrature_error=float(r["quad_error"]), holds=bool(r["holds"]), details=details,
    )


def check_gruss_base(f: MonotoneWeight, g: MonotoneWeight, m: float, M: float, n: float, N: float,
                     cfg: QuadratureConfig | None = None) -> InequalityReport:
    """Čebyšev's inequality and the Grüss bound for two non-decreasing functions.

    Integrals are normalized by the interval length. The margin is the
    smaller of the Čebyšev gap ``mean(fg) - mean(f) mean(g)`` and the Grüss
    slack ``(M - m)(N - n)/4 - (mean(fg) - mean(f) mean(g))``.
    """
    if (f.lo, f.hi) != (g.lo, g.hi):
        raise ValueError("f and g must share a domain")
    lo, hi = f.lo, f.hi
    grid = np.linspace(lo, hi, 1024)
    fv, gv = f(grid), g(grid)
    if fv.min() < m or fv.max() > M or gv.min() < n or gv.max() > N:
        raise ValueError("declared bounds do not contain f and g on the domain")
    cfg = cfg or QuadratureConfig()
    r = integrate(lambda ts: np.stack([f(ts), g(ts), f(ts) * g(ts)], axis=1), lo, hi, cfg, batch_ndim=1)
    width = hi - lo
    mf, mg, mfg = r.value / width
    err = float(np.sum(r.error)) / width * (1.0 + abs(mf) + abs(mg))
    cheb = mfg - mf * mg
    bound = 0.25 * (M - m) * (N - n)
    slack = bound - cheb
    tol = REL_TOL * (1.0 + abs(mfg) + abs(mf * mg)) + err
    margin = min(cheb, slack)
    return InequalityReport(
        suite_id="GRUSS_BASE",
        inputs={"f": f.name, "g": g.name, "domain": [lo, hi], "bounds": [m, M, n, N]},
        lhs=float(mf * mg), rhs=float(mfg), margin=float(margin), tol=float(tol),
        refinement_gain=None, quadrature_error=err, holds=bool(margin >= -tol),
        details={"chebyshev_margin": float(cheb), "gruss_slack": float(slack), "gruss_bound": bound},
    )


@dataclass(frozen=True)
class Eq67Record:
    x: float
    lhs6: float
    lhs7: float
    rhs: float
    margin6: float
    margin7: float
    holds6: bool
    holds7: bool
    ordering: int  # sign(lhs7 - lhs6)


def eq67_terms(x):
    """Left sides of the two comparison bounds and their common right side, vectorized.

    With ``u = ln x``: ``lhs6 = u expm1(u) / (2 (u^2 + 4))``,
    ``lhs7 = u^2 sqrt(x) / 8`` and ``rhs = 2 sqrt(x) sinh^2(u/4)``.
    """
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise ValueError("x must be positive")
    u = np.log(x)
    lhs6 = u * np.expm1(u) / (2.0 * (u * u + 4.0))
    lhs7 = u * u * np.exp(u / 2.0) / 8.0
    rhs = 2.0 * np.exp(u / 2.0) * np.sinh(u / 4.0) ** 2
    return lhs6, lhs7, rhs


def ordering_function(x):
    """``(lhs7 - lhs6) / ln^2 x``, whose sign is the ordering of the two left sides."""
    u = np.log(np.asarray(x, dtype=float))
    small = np.abs(u) < _EQ67_CUTOFF
    us = np.where(small, 1.0, u)
    direct = np.exp(us / 2.0) / 8.0 - np.expm1(us) / (2.0 * us * (us * us + 4.0))
    return np.where(small, 5.0 * u**2 / 192.0 + 5.0 * u**3 / 384.0, direct)


def compare_eq6_eq7(x: float, rel_tol: float = REL_TOL) -> Eq67Record:
    """Both comparison inequalities at ``x`` plus the ordering of their left sides."""
    lhs6, lhs7, rhs = (float(z) for z in eq67_terms(x))
    m6, m7 = rhs - lhs6, rhs - lhs7
    return Eq67Record(
        x=float(x), lhs6=lhs6, lhs7=lhs7, rhs=rhs, margin6=m6, margin7=m7,
        holds6=m6 >= -rel_tol * (rhs + lhs6), holds7=m7 >= -rel_tol * (rhs + lhs7),
        ordering=int(np.sign(ordering_function(x))),
    )


def find_ordering_crossovers(lo: float, hi: float, grid_points: int = 2000,
                             bisect_tol: float = 1e-12) -> list[float]:
    """Sign changes of ``lhs7 - lhs6`` on a log grid over ``[lo, hi]``, refined by bisection.

    Bisection runs in ``ln x`` until the bracket's relative width is below
    ``bisect_tol``. Touching zeros (as at ``x = 1``) are not crossings.
    """
    if lo <= 0:
        raise ValueError("lo must be positive")
    if grid_points < 2:
        raise ValueError("grid_points must be at least 2")
    if not lo < hi:
        return []
    xs = np.geomspace(lo, hi, grid_points)
    sg = np.sign(ordering_function(xs))
    keep = sg != 0
    xs, sg = xs[keep], sg[keep]
    found = []
    for i in np.flatnonzero(sg[:-1] * sg[1:] < 0):
        l, h = np.log(xs[i]), np.log(xs[i + 1])
        sl = sg[i]
        while np.expm1(h - l) > bisect_tol:
            mid = 0.5 * (l + h)
            sm = np.sign(ordering_function(np.exp(mid)))
            if sm == 0:
                l = h = mid
                break
            if sm == sl:
                l = mid
            else:
                h = mid
        found.append(float(np.exp(0.5 * (l + h))))
    return found


CLAIMED_THRESHOLD = 11288.0


def crossover_verdict(crossings: list[float], lo: float, hi: float,
                      claim: float = CLAIMED_THRESHOLD, grid_points: int = 2000) -> str:
    """Compare measured crossovers with the claim that ``lhs6 > lhs7`` for all ``x > claim``.

    UNDETERMINED when nothing crosses in the range or the range does not
    extend past the claim; CONSISTENT when the ordering is ``lhs6 > lhs7``
    at every grid point above the claim; INCONSISTENT otherwise.
    """
    if not crossings or hi <= claim:
        return "UNDETERMINED"
    xs = np.geomspace(max(lo, claim), hi, grid_points)
    xs = xs[xs > claim]
    return "CONSISTENT" if np.all(ordering_function(xs) < 0) else "INCONSISTENT"


def sweep_rows(ineq: str, lo: float, hi: float, points: int, v: float = 0.5,
               g: MonotoneWeight | None = None, s: float = 1.0) -> list[dict]:
    """Rows of named terms on a log grid of ``x = b/a`` with ``a = 1``."""
    if lo <= 0 or hi < lo or points < 1:
        raise ValueError("need 0 < lo <= hi and points >= 1")
    xs = np.array([lo]) if lo == hi else np.geomspace(lo, hi, points)
    if ineq == "EQ6_EQ7":
        return [vars(compare_eq6_eq7(x)) for x in xs]
    r = scalar_terms(ineq, np.ones_like(xs), xs, v, g, s=s)
    keys = ("lhs", "rhs", "unrefined", "gain", "quad_error", "tol", "margin", "holds")
    rows = []
    for i, x in enumerate(xs):
        row = {"x": float(x)}
        for k in keys:
            val = r[k][i]
            row[k] = bool(val) if k == "holds" else float(val)
        rows.append(row)
    return rows
