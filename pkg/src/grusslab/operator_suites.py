"""Operator refinement checks (Heron, Heinz/logarithmic, power means, entropy).

Both sides of every inequality are assembled with matrix-valued quadrature
and compared in Loewner order. The kernels accept a single pair or a 1-D
stack of pairs, with per-instance ``v`` and per-instance weights allowed.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from . import means
from .errors import DomainViolation
from .hermitian import LoewnerReport, eigvalsh, hermitize, spectral_norm_herm
from .means import MeanParams
from .opmeans import (
    PositivePair,
    ln_p,
    log_mean_op,
    op_arith,
    op_geom,
    op_harm,
    printed_log_term,
    relative_entropy,
)
from .quadrature import Integrand, QuadratureConfig, integrate
from .report import InequalityReport
from .weights import MonotoneWeight, WeightKind

OPERATOR_SUITES = ("OP_HERON", "OP_HEINZ_LOG", "OP_POWER_AG", "OP_POWER_HG", "OP_ENTROPY")

OPERATOR_DOMAIN = {
    "OP_HERON": (0.0, 1.0),
    "OP_HEINZ_LOG": (0.5, 1.0),
    "OP_POWER_AG": (0.0, 1.0),
    "OP_POWER_HG": (-1.0, 0.0),
    "OP_ENTROPY": (0.0, 1.0),
}

#: Scalar suite whose eigenvalue-wise application matches each operator suite on commuting pairs.
SCALAR_COUNTERPART = {
    "OP_HERON": "THM1",
    "OP_HEINZ_LOG": "THM2",
    "OP_POWER_AG": "POWER_AG",
    "OP_POWER_HG": "POWER_HG",
    "OP_ENTROPY": "ENTROPY",
}

PSD_REL_TOL = 1e-9


class _Weights:
    """One weight for the whole batch, or one per instance."""

    def __init__(self, g, batch_shape, lo, hi, cfg):
        gs = [g] if isinstance(g, MonotoneWeight) else list(g)
        for w in gs:
            if (w.lo, w.hi) != (lo, hi):
                raise ValueError(f"weight {w.name} on [{w.lo}, {w.hi}], suite needs [{lo}, {hi}]")
        self.per_instance = not isinstance(g, MonotoneWeight)
        if self.per_instance and (len(batch_shape) != 1 or len(gs) != batch_shape[0]):
            raise ValueError("per-instance weights need a 1-D batch of matching length")
        self.gs = gs
        self.nb = len(batch_shape)
        self.spread = np.array([w.spread for w in gs])
        r = integrate(lambda ts: np.stack([w(ts) for w in gs], axis=1), lo, hi, cfg, batch_ndim=1)
        self.integral, self.integral_err = r.value, r.error
        if not self.per_instance:
            self.spread = self.spread[0]
            self.integral, self.integral_err = self.integral[0], self.integral_err[0]

    def table(self, ts):
        """Weights at nodes, shaped to multiply a ``(k, *batch, n, n)`` stack."""
        if self.per_instance:
            return np.stack([w(ts) for w in self.gs], axis=1)[:, :, None, None]
        return self.gs[0](ts).reshape((-1,) + (1,) * (self.nb + 2))

    def bcast(self, x, mat_ndim=2):
        x = np.asarray(x)
        return x.reshape(x.shape + (1,) * mat_ndim) if self.per_instance else x


def _node_shape(ts, pair):
    """Reshape node vector to broadcast with eigenvalue arrays ``(*batch, n)``."""
    return ts.reshape((-1,) + (1,) * (len(pair.batch_shape) + 1))


def _as_v(v):
    v = np.asarray(v, dtype=float)
    if np.any((v < 0) | (v > 1)):
        raise ValueError("v must lie in [0, 1]")
    return v


def _vb(v):
    """Per-instance ``v`` broadcast against ``(*batch, n)`` eigenvalue arrays."""
    return v[..., None] if v.ndim else v


def operator_terms(suite: str, pair: PositivePair, v=0.5, g=None, s: float = 1.0,
                   cfg: QuadratureConfig | None = None, tol_psd=None) -> dict:
    """Assemble both sides of one operator refinement and compare them.

    Returns a dict of per-instance arrays: ``lhs`` and ``rhs`` matrices,
    ``unrefined`` (the left side without its integral term),
    ``margins`` (ascending eigenvalues of ``rhs - lhs``), ``min_eig_diff``,
    ``gain`` (smallest eigenvalue of the added term), ``quad_error``, ``tol``
    and ``holds``.
    """
    if suite not in OPERATOR_SUITES:
        raise ValueError(f"unknown operator suite {suite!r}")
    if len(pair.batch_shape) > 1:
        raise ValueError("operator suites take a single pair or a 1-D stack")
    cfg = cfg or QuadratureConfig()
    lo, hi = OPERATOR_DOMAIN[suite]
    if suite == "OP_ENTROPY":
        if not 0.0 < s <= 1.0:
            raise ValueError("entropy order s must lie in (0, 1]")
        g = MonotoneWeight(WeightKind.AFFINE, 0.0, 1.0)
    if suite == "OP_HEINZ_LOG":
        v = 0.5
    if g is None:
        raise ValueError(f"{suite} needs a weight function")
    v = _as_v(v)
    W = _Weights(g, pair.batch_shape, lo, hi, cfg)
    nb = len(pair.batch_shape)
    lam = pair.ratio_eigenvalues

    def quad(fn, endpoint_values=(None, None)):
        return integrate(Integrand(fn, endpoint_values), lo, hi, cfg, batch_ndim=nb, hermitian=True)

    details: dict = {}
    if suite == "OP_HERON":
        geo, ari = op_geom(pair, v), op_arith(pair, v)
        half = hermitize(0.5 * (geo + ari))

        def heron(ts):
            t = ts.reshape((-1,) + (1,) * (nb + 2))
            return ((1 - t) * geo + t * ari - half) * W.table(ts)

        r = quad(heron)
        coef = W.bcast(4.0 / W.spread)
        unrefined, rhs = geo, ari
        lhs = hermitize(geo + coef * r.value)
        qerr = (4.0 / W.spread) * r.error
    elif suite == "OP_HEINZ_LOG":
        geo, ari = op_geom(pair, 0.5), op_arith(pair, 0.5)
        L = log_mean_op(pair)

        def heinz(ts):
            t = _node_shape(ts, pair)
            return pair.congruence(0.5 * (lam**t + lam ** (1 - t))) * W.table(ts)

        r = quad(heinz)
        coef = W.bcast(2.0 / W.spread)
        unrefined, rhs = geo, ari
        lhs = hermitize(geo + coef * (r.value - L * W.bcast(W.integral)))
        L_norm = np.linalg.norm(L, axis=(-2, -1))
        qerr = (2.0 / W.spread) * (r.error + L_norm * W.integral_err)
        details["printed_form_diff"] = _printed_diff(pair, L)
    elif suite in ("OP_POWER_AG", "OP_POWER_HG"):
        def power(ts):
            return pair.congruence(means.power_mean(1.0, lam, _node_shape(ts, pair), _vb(v)))

        r1 = quad(lambda ts: power(ts) * W.table(ts))
        r2 = quad(power)
        coef = W.bcast(4.0 / W.spread)
        geo = op_geom(pair, v)
        if suite == "OP_POWER_AG":
            unrefined, rhs = geo, op_arith(pair, v)
        else:
            unrefined, rhs = op_harm(pair, v), geo
        lhs = hermitize(unrefined + coef * (r1.value - r2.value * W.bcast(W.integral)))
        i2_norm = np.linalg.norm(r2.value, axis=(-2, -1))
        qerr = (4.0 / W.spread) * (r1.error + r2.error * np.abs(W.integral) + i2_norm * W.integral_err)
    else:
        S0 = relative_entropy(pair, 0.0)

        def entropy(ts):
            t = _node_shape(ts, pair)
            return pair.congruence((2 * t - 1) * ln_p(lam, s * t))

        r = quad(entropy, endpoint_values=(-S0, None))
        unrefined = S0
        lhs = hermitize(S0 + 2.0 * r.value)
        rhs = relative_entropy(pair, s)
        qerr = 2.0 * r.error

    margins = eigvalsh(rhs - lhs)
    gain = eigvalsh(lhs - unrefined)[..., 0]
    if tol_psd is None:
        tol_psd = PSD_REL_TOL * (1.0 + spectral_norm_herm(lhs) + spectral_norm_herm(rhs))
    tol = tol_psd + qerr
    return {
        "lhs": lhs, "rhs": rhs, "unrefined": unrefined, "margins": margins,
        "min_eig_diff": margins[..., 0], "gain": gain, "quad_error": qerr,
        "tol_psd": np.broadcast_to(tol_psd, np.shape(qerr)), "tol": tol,
        "holds": margins[..., 0] >= -tol, "details": details,
    }


def _printed_diff(pair: PositivePair, L) -> float | None:
    """``||(B - A) S_0^{-1} A - L||_F`` for a single pair; None if ``S_0`` is singular."""
    if pair.batch_shape:
        return None
    try:
        return float(np.linalg.norm(printed_log_term(pair) - L))
    except DomainViolation:
        return None


def check_operator_refinement(suite: str, pair: PositivePair, params: MeanParams = MeanParams(),
                              g: MonotoneWeight | Sequence[MonotoneWeight] | None = None,
                              s: float = 1.0, cfg: QuadratureConfig | None = None,
                              tol_psd: float | None = None) -> InequalityReport:
    """Check one operator refinement for a single pair; ``params.v`` is the mean weight."""
    if pair.batch_shape:
        raise ValueError("check_operator_refinement takes a single pair; use operator_terms for stacks")
    r = operator_terms(suite, pair, params.v, g, s, cfg, tol_psd)
    tol = float(r["tol"])
    inputs = {"n": pair.n, "v": params.v, "weight": getattr(g, "name", None)}
    if suite == "OP_ENTROPY":
        inputs.update(weight="affine", s=s)
    if suite == "OP_HEINZ_LOG":
        inputs["v"] = 0.5
    details = dict(r["details"])
    details.update(margins=[float(m) for m in r["margins"]], tol_psd=float(r["tol_psd"]),
                   gain_nonnegative=bool(r["gain"] >= -tol))
    return InequalityReport(
        suite_id=suite, inputs=inputs,
        lhs=LoewnerReport(float(r["min_eig_diff"]), tol, bool(r["holds"])), rhs=None,
        margin=float(r["min_eig_diff"]), tol=tol, refinement_gain=float(r["gain"]),
        quadrature_error=float(r["quad_error"]), holds=bool(r["holds"]), details=details,
    )
