"""Hermitian matrix primitives: eigensolver, functional calculus, Loewner order.

Every routine accepts a single ``(n, n)`` matrix or a stack ``(..., n, n)``
and works on each matrix independently, so results for one matrix never
depend on what else is in the batch.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DimensionMismatch, DomainViolation, NoConvergence, NotHermitian

EPS = np.finfo(float).eps

#: Jacobi sweep cap.
MAX_SWEEPS = 100


def ctranspose(X):
    """Conjugate transpose over the last two axes."""
    return np.swapaxes(np.conj(X), -2, -1)


def _check_square(M):
    M = np.asarray(M)
    if M.ndim < 2 or M.shape[-1] != M.shape[-2]:
        raise DimensionMismatch(f"expected square matrices, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix entries must be finite")
    return M


def complex_matrix(M) -> np.ndarray:
    """Validate a (stack of) finite square matrix and return a complex copy."""
    return np.array(_check_square(M), dtype=complex)


def hermitian(M, tol_herm: float = 1e-12) -> np.ndarray:
    """Validate ``M`` as Hermitian and return its exact symmetrization.

    The check is ``||M - M*||_F <= tol_herm * (1 + ||M||_F)`` per matrix.
    The returned array satisfies ``H[i, j] == conj(H[j, i])`` bit for bit.
    """
    M = complex_matrix(M)
    Mh = ctranspose(M)
    asym = np.linalg.norm(M - Mh, axis=(-2, -1))
    scale = 1.0 + np.linalg.norm(M, axis=(-2, -1))
    if np.any(asym > tol_herm * scale):
        raise NotHermitian(f"asymmetry {np.max(asym):.3e} exceeds tolerance")
    return 0.5 * (M + Mh)


def hermitize(M) -> np.ndarray:
    """Symmetrize without validation (for results that are Hermitian in exact arithmetic)."""
    M = np.asarray(M, dtype=complex)
    return 0.5 * (M + ctranspose(M))


@dataclass(frozen=True)
class SpectralDecomposition:
    """``H = U diag(eigenvalues) U*`` with eigenvalues ascending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self, values=None) -> np.ndarray:
        """Return ``U diag(values) U*``; defaults to the eigenvalues."""
        lam = self.eigenvalues if values is None else values
        U = self.eigenvectors
        return hermitize((U * np.asarray(lam)[..., None, :]) @ ctranspose(U))


def _jacobi(A: np.ndarray, max_sweeps: int):
    """Cyclic complex Jacobi on a stack ``(b, n, n)``.

    Pivots are visited in row-cyclic order (0,1), (0,2), ..., (n-2, n-1).
    A matrix is frozen once its off-diagonal Frobenius norm is below
    ``n * eps * ||A||_F``; frozen matrices receive identity rotations.
    """
    b, n, _ = A.shape
    A = A.copy()
    V = np.broadcast_to(np.eye(n, dtype=complex), (b, n, n)).copy()
    if n == 1:
        return A[:, 0, 0].real[:, None], V
    scale = np.linalg.norm(A, axis=(1, 2))
    stop = n * EPS * scale
    skip = EPS * scale / n
    offmask = ~np.eye(n, dtype=bool)
    rows = np.arange(b)
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.abs(A[:, offmask]) ** 2, axis=1))
        active = off > stop
        if not active.any():
            return np.real(np.diagonal(A, axis1=1, axis2=2)).copy(), V
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[:, p, q]
                mag = np.abs(apq)
                rot = active & (mag > skip)
                if not rot.any():
                    continue
                safe = np.where(rot, mag, 1.0)
                phase = np.where(rot, apq / safe, 1.0)
                app = A[:, p, p].real.copy()
                aqq = A[:, q, q].real.copy()
                tau = (aqq - app) / (2.0 * safe)
                t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
                t = np.where(rot, t, 0.0)
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                cph = np.conj(phase)

                cp = A[:, :, p].copy()
                cq = A[:, :, q]
                A[:, :, p] = c[:, None] * cp - (s * cph)[:, None] * cq
                A[:, :, q] = s[:, None] * cp + (c * cph)[:, None] * cq
                rp = A[:, p, :].copy()
                rq = A[:, q, :]
                A[:, p, :] = c[:, None] * rp - (s * phase)[:, None] * rq
                A[:, q, :] = s[:, None] * rp + (c * phase)[:, None] * rq

                newpp = app - t * mag
                newqq = aqq + t * mag
                A[rows, p, p] = np.where(rot, newpp, A[:, p, p])
                A[rows, q, q] = np.where(rot, newqq, A[:, q, q])
                A[rows, p, q] = np.where(rot, 0.0, A[:, p, q])
                A[rows, q, p] = np.where(rot, 0.0, A[:, q, p])

                vp = V[:, :, p].copy()
                vq = V[:, :, q]
                V[:, :, p] = c[:, None] * vp - (s * cph)[:, None] * vq
                V[:, :, q] = s[:, None] * vp + (c * cph)[:, None] * vq
    raise NoConvergence(f"Jacobi did not converge within {max_sweeps} sweeps")


def eigh(H, max_sweeps: int = MAX_SWEEPS) -> SpectralDecomposition:
    """Eigendecomposition of Hermitian matrices by cyclic Jacobi rotations.

    Parameters
    ----------
    H : array_like, shape (..., n, n)
        Hermitian matrices (validated and symmetrized).
    max_sweeps : int
        Sweep cap; exceeding it raises :class:`NoConvergence`.

    Returns
    -------
    SpectralDecomposition
        Ascending real eigenvalues ``(..., n)`` and unitary eigenvectors
        ``(..., n, n)`` stored as columns.
    """
    H = hermitian(H)
    shape = H.shape
    n = shape[-1]
    flat = H.reshape(-1, n, n)
    lam, V = _jacobi(flat, max_sweeps)
    order = np.argsort(lam, axis=1, kind="stable")
    lam = np.take_along_axis(lam, order, axis=1)
    V = np.take_along_axis(V, order[:, None, :], axis=2)
    return SpectralDecomposition(lam.reshape(shape[:-1]), V.reshape(shape))


def eigvalsh(H) -> np.ndarray:
    return eigh(H).eigenvalues


@dataclass(frozen=True)
class Domain:
    """Real interval on which a scalar function is defined."""

    lo: float = -np.inf
    hi: float = np.inf
    lo_closed: bool = False
    hi_closed: bool = False

    def project(self, lam: np.ndarray, tol) -> np.ndarray:
        """Clamp eigenvalues within ``tol`` of a closed boundary; reject the rest."""
        lam = np.array(lam, dtype=float)
        tol = np.asarray(tol)[..., None] if np.ndim(tol) else tol
        if np.isfinite(self.lo):
            below = lam < self.lo
            if self.lo_closed:
                bad = lam < self.lo - tol
                lam = np.where(below & ~bad, self.lo, lam)
            else:
                bad = lam <= self.lo
            if np.any(bad):
                raise DomainViolation(f"eigenvalue {np.min(lam):.6g} below domain bound {self.lo}")
        if np.isfinite(self.hi):
            above = lam > self.hi
            if self.hi_closed:
                bad = lam > self.hi + tol
                lam = np.where(above & ~bad, self.hi, lam)
            else:
                bad = lam >= self.hi
            if np.any(bad):
                raise DomainViolation(f"eigenvalue {np.max(lam):.6g} above domain bound {self.hi}")
        return lam


REALS = Domain()
NONNEGATIVE = Domain(0.0, np.inf, lo_closed=True)
POSITIVE = Domain(0.0, np.inf)


def apply_function(
    H,
    f: Callable[[np.ndarray], np.ndarray],
    domain: Domain = REALS,
    tol_dom=None,
    decomposition: SpectralDecomposition | None = None,
) -> np.ndarray:
    """Return ``U f(Lambda) U*`` for Hermitian ``H``.

    ``f`` must be vectorized over real arrays. Eigenvalues within
    ``tol_dom`` (default ``1e-12 * (1 + ||H||_2)``) of a closed domain
    boundary are clamped onto it; anything further out raises
    :class:`DomainViolation`.
    """
    dec = eigh(H) if decomposition is None else decomposition
    lam = dec.eigenvalues
    if tol_dom is None:
        tol_dom = 1e-12 * (1.0 + np.max(np.abs(lam), axis=-1))
    lam = domain.project(lam, tol_dom)
    return dec.reconstruct(f(lam))


def sqrtm(H) -> np.ndarray:
    return apply_function(H, np.sqrt, NONNEGATIVE)


def logm(H) -> np.ndarray:
    return apply_function(H, np.log, POSITIVE)


def powm(H, p: float) -> np.ndarray:
    dom = POSITIVE if p < 0 else NONNEGATIVE
    return apply_function(H, lambda x: np.power(x, p), dom)


def invm(H) -> np.ndarray:
    return apply_function(H, np.reciprocal, POSITIVE)


@dataclass(frozen=True)
class LoewnerReport:
    """Outcome of an ``X <= Y`` check: smallest eigenvalue of ``Y - X``."""

    min_eig_diff: float
    tol: float
    holds: bool


def loewner_margins(X, Y, tol=None):
    """Batched Loewner check; returns ``(min_eig_diff, tol, holds)`` arrays."""
    X = hermitian(X)
    Y = hermitian(Y)
    if X.shape != Y.shape:
        raise DimensionMismatch(f"shapes differ: {X.shape} vs {Y.shape}")
    diff = eigvalsh(Y - X)[..., 0]
    if tol is None:
        tol = 1e-9 * (1.0 + spectral_norm_herm(X) + spectral_norm_herm(Y))
    return diff, tol, diff >= -np.asarray(tol)


def loewner_leq(X, Y, tol: float | None = None) -> LoewnerReport:
    """Check ``X <= Y`` in Loewner order for one pair of matrices.

    Default tolerance is ``1e-9 * (1 + ||X||_2 + ||Y||_2)``.
    """
    d, t, h = loewner_margins(X, Y, tol)
    if np.ndim(d):
        raise DimensionMismatch("loewner_leq takes single matrices; use loewner_margins for stacks")
    return LoewnerReport(float(d), float(t), bool(h))


def spectral_norm_herm(H) -> np.ndarray:
    """Spectral norm of Hermitian matrices (largest |eigenvalue|)."""
    lam = eigvalsh(H)
    return np.maximum(np.abs(lam[..., 0]), np.abs(lam[..., -1]))


def operator_norm(M) -> np.ndarray | float:
    """Largest singular value, ``sqrt(lambda_max(M* M))``."""
    M = complex_matrix(M)
    lam = eigvalsh(hermitize(ctranspose(M) @ M))[..., -1]
    out = np.sqrt(np.maximum(lam, 0.0))
    return float(out) if out.ndim == 0 else out


def abs_op(T) -> np.ndarray:
    """Operator modulus ``|T| = (T* T)^{1/2}``."""
    T = complex_matrix(T)
    return sqrtm(hermitize(ctranspose(T) @ T))


def quad_form(X, x) -> np.ndarray:
    """``<X x, x> = x* X x`` for stacks of matrices and vectors."""
    x = np.asarray(x)
    return np.einsum("...i,...ij,...j->...", np.conj(x), X, x)


def matrix_to_json(M) -> dict:
    """Encode a square matrix as ``{"n", "re", "im"}``."""
    M = complex_matrix(M)
    if M.ndim != 2:
        raise DimensionMismatch("matrix_to_json takes a single matrix")
    return {"n": M.shape[0], "re": M.real.tolist(), "im": M.imag.tolist()}


def matrix_from_json(obj: dict) -> np.ndarray:
    """Decode ``{"n", "re", "im"}``; a missing ``"im"`` means a real matrix."""
    n = int(obj["n"])
    re = np.asarray(obj["re"], dtype=float)
    im = np.asarray(obj.get("im", np.zeros((n, n))), dtype=float)
    if re.shape != (n, n) or im.shape != (n, n):
        raise DimensionMismatch(f"expected {n}x{n} blocks, got {re.shape} and {im.shape}")
    return re + 1j * im
