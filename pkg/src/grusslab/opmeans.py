"""Operator means and relative operator entropies of positive definite pairs.

Every mean except the harmonic one is computed through the congruence
``A^{1/2} h(C) A^{1/2}`` with ``C = A^{-1/2} B A^{-1/2}``. Writing
``C = U diag(lam) U*`` and ``W = A^{1/2} U`` this is ``W diag(h(lam)) W*``,
so one factorization per pair serves every mean and every node of a
quadrature rule. The harmonic mean is computed from matrix inverses on
purpose: it gives an independent route to check the power mean at
``t = -1``.
"""

from __future__ import annotations

from functools import cached_property

import numpy as np

from . import means
from .errors import DimensionMismatch, DomainViolation
from .hermitian import POSITIVE, apply_function, ctranspose, eigh, hermitian, hermitize
from .means import MeanKind, MeanParams

#: Below this order the Tsallis entropy falls back to the logarithmic branch.
ENTROPY_LOG_CUTOFF = 1e-8


class PositivePair:
    """A pair (or stack of pairs) of positive definite matrices.

    Parameters
    ----------
    A, B : array_like, shape (..., n, n)
        Hermitian matrices with smallest eigenvalue at least ``min_eig_floor``.
    min_eig_floor : float
        Strict positivity witness.
    """

    def __init__(self, A, B, min_eig_floor: float = 1e-10):
        A = hermitian(A)
        B = hermitian(B)
        if A.shape != B.shape:
            raise DimensionMismatch(f"A {A.shape} and B {B.shape} differ")
        self.A = A
        self.B = B
        self.min_eig_floor = min_eig_floor
        if np.any(self.eig_a.eigenvalues[..., 0] < min_eig_floor):
            raise DomainViolation("A is not positive definite above the floor")
        if np.any(self.eig_b.eigenvalues[..., 0] < min_eig_floor):
            raise DomainViolation("B is not positive definite above the floor")

    @property
    def n(self) -> int:
        return self.A.shape[-1]

    @property
    def batch_shape(self) -> tuple:
        return self.A.shape[:-2]

    @cached_property
    def eig_a(self):
        return eigh(self.A)

    @cached_property
    def eig_b(self):
        return eigh(self.B)

    @cached_property
    def a_half(self):
        return self.eig_a.reconstruct(np.sqrt(self.eig_a.eigenvalues))

    @cached_property
    def a_ihalf(self):
        return self.eig_a.reconstruct(1.0 / np.sqrt(self.eig_a.eigenvalues))

    @cached_property
    def eig_c(self):
        """Eigendecomposition of ``A^{-1/2} B A^{-1/2}``."""
        return eigh(hermitize(self.a_ihalf @ self.B @ self.a_ihalf))

    @cached_property
    def ratio_eigenvalues(self) -> np.ndarray:
        lam = self.eig_c.eigenvalues
        if np.any(lam <= 0):
            raise DomainViolation("A^{-1/2} B A^{-1/2} lost positivity numerically")
        return lam

    @cached_property
    def _w(self):
        return self.a_half @ self.eig_c.eigenvectors

    def congruence(self, h) -> np.ndarray:
        """``W diag(h) W*`` for ``h`` of shape ``(..., *batch, n)``.

        Extra leading axes on ``h`` (e.g. quadrature nodes) broadcast against
        the pair's batch shape.
        """
        W = self._w
        out = (W * np.asarray(h)[..., None, :]) @ ctranspose(W)
        return hermitize(out)

    def functional(self, f) -> np.ndarray:
        """``A^{1/2} f(A^{-1/2} B A^{-1/2}) A^{1/2}`` for a scalar function ``f``."""
        return self.congruence(f(self.ratio_eigenvalues))


def _v(v, pair: PositivePair):
    v = np.asarray(v, dtype=float)
    # per-instance weights broadcast over the matrix axes
    return v[..., None, None] if v.ndim else v


def op_arith(pair: PositivePair, v=0.5) -> np.ndarray:
    vv = _v(v, pair)
    return hermitize((1.0 - vv) * pair.A + vv * pair.B)


def op_geom(pair: PositivePair, v=0.5) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    lam = pair.ratio_eigenvalues
    return pair.congruence(lam ** (v[..., None] if v.ndim else v))


def op_harm(pair: PositivePair, v=0.5) -> np.ndarray:
    """``((1 - v) A^{-1} + v B^{-1})^{-1}`` by explicit inverses."""
    vv = _v(v, pair)
    a_inv = pair.eig_a.reconstruct(1.0 / pair.eig_a.eigenvalues)
    b_inv = pair.eig_b.reconstruct(1.0 / pair.eig_b.eigenvalues)
    return apply_function(hermitize((1.0 - vv) * a_inv + vv * b_inv), np.reciprocal, POSITIVE)


def op_heron(pair: PositivePair, t, v=0.5) -> np.ndarray:
    tt = _v(t, pair)
    return hermitize((1.0 - tt) * op_geom(pair, v) + tt * op_arith(pair, v))


def op_heinz(pair: PositivePair, t) -> np.ndarray:
    """``(A #_t B + A #_{1-t} B) / 2``."""
    t = np.asarray(t, dtype=float)[..., None] if np.ndim(t) else t
    lam = pair.ratio_eigenvalues
    return pair.congruence(0.5 * (lam**t + lam ** (1.0 - t)))


def op_power(pair: PositivePair, t, v=0.5) -> np.ndarray:
    """``A m_{t,v} B``; the geometric mean at ``t = 0``."""
    t = np.asarray(t, dtype=float)
    v = np.asarray(v, dtype=float)
    lam = pair.ratio_eigenvalues
    h = means.power_mean(1.0, lam, t[..., None] if t.ndim else t, v[..., None] if v.ndim else v)
    return pair.congruence(h)


def op_mean(kind: MeanKind, pair: PositivePair, params: MeanParams = MeanParams()) -> np.ndarray:
    """Operator counterpart of :func:`grusslab.means.scalar_mean`."""
    t, v = params.t, params.v
    if kind is MeanKind.ARITH:
        return op_arith(pair, v)
    if kind is MeanKind.GEOM:
        return op_geom(pair, v)
    if kind is MeanKind.HARM:
        return op_harm(pair, v)
    if kind in (MeanKind.HERON, MeanKind.HEINZ) and t < 0:
        raise ValueError(f"{kind.name} requires t in [0, 1]")
    if kind is MeanKind.HERON:
        return op_heron(pair, t, v)
    if kind is MeanKind.HEINZ:
        return op_heinz(pair, t)
    if kind is MeanKind.POWER:
        return op_power(pair, t, v)
    raise ValueError(f"unknown mean kind {kind!r}")


def ln_p(lam, p):
    """Deformed logarithm with the exact logarithm below :data:`ENTROPY_LOG_CUTOFF`."""
    p = np.asarray(p, dtype=float)
    logs = np.log(lam)
    return np.where(p < ENTROPY_LOG_CUTOFF, logs, means.deformed_log(np.maximum(p, 0.0), lam))


def relative_entropy(pair: PositivePair, p=0.0) -> np.ndarray:
    """Tsallis relative operator entropy ``A^{1/2} ln_p(A^{-1/2} B A^{-1/2}) A^{1/2}``.

    ``p = 0`` gives the relative operator entropy with the matrix logarithm.
    An array ``p`` of shape ``(k,)`` yields a stack over the leading axis,
    which is how quadrature over the order is done.
    """
    p = np.asarray(p, dtype=float)
    if np.any((p < 0) | (p > 1)):
        raise ValueError("entropy order must lie in [0, 1]")
    lam = pair.ratio_eigenvalues
    pp = p.reshape(p.shape + (1,) * lam.ndim) if p.ndim else p
    return pair.congruence(ln_p(lam, pp))


def log_mean_op(pair: PositivePair) -> np.ndarray:
    """Logarithmic mean ``A^{1/2} f(C) A^{1/2}`` with ``f(x) = (x - 1) / ln x``."""
    return pair.congruence(means.log_mean(1.0, pair.ratio_eigenvalues))


def printed_log_term(pair: PositivePair) -> np.ndarray:
    """``(B - A) S_0(A|B)^{-1} A`` evaluated literally with a dense inverse.

    Expanding the factors gives ``A^{1/2} (C - I) log(C)^{-1} A^{1/2}``, so
    this agrees with :func:`log_mean_op` up to roundoff whenever ``S_0`` is
    invertible; it serves as an independent check of that form. Singular
    ``S_0`` (some eigenvalue of ``C`` equal to 1) raises
    :class:`DomainViolation`.
    """
    S0 = relative_entropy(pair, 0.0)
    lam = eigh(S0).eigenvalues
    scale = np.max(np.abs(lam), axis=-1)
    if np.any(np.min(np.abs(lam), axis=-1) <= 1e-12 * (1.0 + scale)):
        raise DomainViolation("S_0(A|B) is numerically singular")
    return (pair.B - pair.A) @ np.linalg.inv(S0) @ pair.A
