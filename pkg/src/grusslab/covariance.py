"""Covariance-type inequalities for operators and the numerical radius.

The ``*_terms`` kernels work on stacks: matrices ``(b, n, n)`` with vectors
``(b, n)``. The ``check_*`` functions wrap one instance in an
:class:`~grusslab.report.InequalityReport`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BoundsViolated, DimensionMismatch
from .hermitian import (
    abs_op,
    complex_matrix,
    ctranspose,
    eigvalsh,
    hermitian,
    hermitize,
    operator_norm,
    quad_form,
)
from .report import InequalityReport

REL_TOL = 1e-10
UNIT_TOL = 1e-12
CLAMP_TOL = 1e-12
DEGENERATE_DENOM = 1e-14

#: Grouping used for the correction quotient of the refined operator Gruss bound.
THM13_DENOMINATOR = "8*((M-m)^2*c_B + (N-n)^2*c_A)"


@dataclass(frozen=True)
class UnitVector:
    entries: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.entries, dtype=complex)
        if x.ndim != 1 or x.size == 0:
            raise DimensionMismatch("unit vector must be a nonempty 1-D array")
        if abs(np.linalg.norm(x) - 1.0) > UNIT_TOL:
            raise ValueError(f"vector norm {np.linalg.norm(x)!r} is not 1")
        object.__setattr__(self, "entries", x)

    @property
    def dim(self) -> int:
        return self.entries.size


@dataclass(frozen=True)
class SpectrumBounds:
    """``m I <= A <= M I`` and ``n I <= B <= N I``."""

    m: float
    M: float
    n: float
    N: float

    def __post_init__(self):
        if not (0 < self.m <= self.M and 0 < self.n <= self.N):
            raise ValueError("need 0 < m <= M and 0 < n <= N")


@dataclass(frozen=True)
class CovarianceTerms:
    """``c_A = <(M - A)(A - m) x, x>`` and its B analogue, clamped at 0."""

    c_A: float
    c_B: float


def _vectors(x, n: int) -> np.ndarray:
    x = x.entries if isinstance(x, UnitVector) else np.asarray(x, dtype=complex)
    if x.shape[-1] != n:
        raise DimensionMismatch(f"vector length {x.shape[-1]} does not match dimension {n}")
    norms = np.linalg.norm(x, axis=-1)
    if np.any(np.abs(norms - 1.0) > UNIT_TOL):
        raise ValueError("vectors must have unit norm")
    return x


def _ip(X, x):
    return quad_form(X, x)


# ---------------------------------------------------------------------------
# numerical radius


def _hermitian_part(T, theta):
    rot = np.exp(1j * np.asarray(theta))[..., None, None]
    return hermitize(0.5 * (rot * T + np.conj(rot) * ctranspose(T)))


def _lam_max(T, theta):
    return eigvalsh(_hermitian_part(T, theta))[..., -1]


_ZOOM_POINTS = 33


def _zoom_max(T, centers, half: float, tol: float) -> float:
    """Refine several brackets ``centers +- half`` at once by repeated grid zoom.

    Each round samples every bracket on ``_ZOOM_POINTS`` points in one
    batched eigensolve and recentres on the best sample with a bracket of
    one spacing, so no smoothness of the objective is assumed.
    """
    centers = np.asarray(centers, dtype=float)
    offsets = np.linspace(-1.0, 1.0, _ZOOM_POINTS)
    best = -np.inf
    while True:
        thetas = centers[:, None] + half * offsets
        vals = _lam_max(T[None], thetas.ravel()).reshape(thetas.shape)
        k = np.argmax(vals, axis=1)
        rows = np.arange(len(centers))
        best = max(best, float(vals[rows, k].max()))
        centers = thetas[rows, k]
        if half <= tol:
            return best
        half *= 2.0 / (_ZOOM_POINTS - 1)


def numerical_radius(T, theta_grid: int = 720, refine_tol: float = 1e-10, max_refine: int = 8) -> float:
    """``w(T) = max_theta lambda_max((e^{i theta} T + e^{-i theta} T*) / 2)``.

    A uniform scan over ``[0, 2 pi)`` locates the local maxima; the best
    ``max_refine`` of them are refined together by batched grid zoom to a
    bracket of width ``refine_tol``.
    """
    T = complex_matrix(T)
    if T.ndim != 2:
        raise DimensionMismatch("numerical_radius takes a single matrix")
    if theta_grid < 8:
        raise ValueError("theta_grid must be at least 8")
    if not np.all(np.isfinite(T)):
        raise ValueError("matrix has non-finite entries")
    h = 2.0 * np.pi / theta_grid
    thetas = h * np.arange(theta_grid)
    vals = _lam_max(T[None], thetas)
    peaks = np.flatnonzero((vals >= np.roll(vals, 1)) & (vals >= np.roll(vals, -1)))
    peaks = peaks[np.argsort(-vals[peaks], kind="stable")][:max_refine]
    return max(float(vals.max()), _zoom_max(T, thetas[peaks], h, refine_tol))


# ---------------------------------------------------------------------------
# |T|, |T*| covariance


def thm51_terms(T, x) -> dict:
    """Both sides of the |T|, |T*| covariance bound for stacks of ``(T, x)``."""
    T = complex_matrix(T)
    x = _vectors(x, T.shape[-1])
    P, Q = abs_op(T), abs_op(ctranspose(T))
    cov = np.abs(_ip(P @ Q, x) - _ip(P, x).real * _ip(Q, x).real)
    rhs = (np.linalg.norm(np.einsum("...ij,...j->...i", P, x), axis=-1)
           * np.linalg.norm(np.einsum("...ij,...j->...i", Q, x), axis=-1)
           - np.abs(_ip(T, x)) ** 2)
    tol = REL_TOL * (1.0 + operator_norm(T) ** 2)
    margin = rhs - cov
    return {"lhs": cov, "rhs": rhs, "margin": margin, "tol": tol, "holds": margin >= -tol}


def check_thm51(T, x) -> InequalityReport:
    T = complex_matrix(T)
    r = thm51_terms(T, x)
    return InequalityReport(
        suite_id="THM51", inputs={"n": T.shape[-1]}, lhs=float(r["lhs"]), rhs=float(r["rhs"]),
        margin=float(r["margin"]), tol=float(r["tol"]), holds=bool(r["holds"]),
    )


def kittaneh_terms(T, x) -> dict:
    """Pointwise ``|<Tx,x>|^2 + cov(x) <= ||(|T|^2 + |T*|^2)|| / 2`` for stacks."""
    T = complex_matrix(T)
    x = _vectors(x, T.shape[-1])
    P, Q = abs_op(T), abs_op(ctranspose(T))
    cov = np.abs(_ip(P @ Q, x) - _ip(P, x).real * _ip(Q, x).real)
    lhs = np.abs(_ip(T, x)) ** 2 + cov
    S = hermitize(ctranspose(T) @ T + T @ ctranspose(T))
    rhs = 0.5 * eigvalsh(S)[..., -1]
    tol = REL_TOL * (1.0 + operator_norm(T) ** 2)
    margin = rhs - lhs
    return {"lhs": lhs, "cov": cov, "rhs": rhs, "margin": margin, "tol": tol, "holds": margin >= -tol}


def check_kittaneh_refinement(T, samples, theta_grid: int = 720) -> InequalityReport:
    """Pointwise certificate over ``samples``; ``w(T)^2 + min cov`` is informational only."""
    T = complex_matrix(T)
    xs = [s.entries if isinstance(s, UnitVector) else np.asarray(s, dtype=complex) for s in samples]
    if not xs:
        raise ValueError("need at least one sample vector")
    X = np.stack(xs)
    Ts = np.broadcast_to(T, (len(xs),) + T.shape)
    r = kittaneh_terms(Ts, X)
    worst = int(np.argmin(r["margin"]))
    omega = numerical_radius(T, theta_grid)
    aggregate = omega**2 + float(r["cov"].min())
    rhs = float(r["rhs"][0])
    return InequalityReport(
        suite_id="KITTANEH", inputs={"n": T.shape[-1], "samples": len(xs)},
        lhs=float(r["lhs"][worst]), rhs=rhs, margin=float(r["margin"][worst]),
        tol=float(r["tol"][0]), holds=bool(np.all(r["holds"])),
        details={
            "pointwise_lhs": [float(v) for v in r["lhs"]],
            "numerical_radius": omega,
            "aggregate_estimate": aggregate,
            "aggregate_margin": rhs - aggregate,
        },
    )


# ---------------------------------------------------------------------------
# positive pairs


def x3_terms(A, B, x) -> dict:
    """Covariance bound for a positive pair plus the three-link chain that follows from it."""
    A, B = hermitian(A), hermitian(B)
    if A.shape != B.shape:
        raise DimensionMismatch(f"A {A.shape} and B {B.shape} differ")
    x = _vectors(x, A.shape[-1])
    a, b = _ip(A, x).real, _ip(B, x).real
    a2, b2 = _ip(A @ A, x).real, _ip(B @ B, x).real
    ab = _ip(A @ B, x)
    root = np.sqrt(np.maximum(a2 * b2, 0.0))
    lhs = a * b + np.abs(ab - a * b)
    chain = np.stack([
        (a * b) ** 2,
        ((root + np.abs(ab)) / 2.0) ** 2,
        (a2 * b2 + np.abs(ab) ** 2) / 2.0,
        a2 * b2,
    ])
    link_margins = np.diff(chain, axis=0)
    tol_x3 = REL_TOL * (1.0 + root)
    tol_chain = REL_TOL * (1.0 + chain[-1])
    holds = (root - lhs >= -tol_x3) & np.all(link_margins >= -tol_chain, axis=0)
    return {"lhs": lhs, "rhs": root, "margin": root - lhs, "tol": tol_x3,
            "chain": chain, "link_margins": link_margins, "chain_tol": tol_chain, "holds": holds}


def check_x3_and_rem11(A, B, x) -> InequalityReport:
    r = x3_terms(A, B, x)
    return InequalityReport(
        suite_id="X3_REM11", inputs={"n": np.shape(A)[-1]}, lhs=float(r["lhs"]), rhs=float(r["rhs"]),
        margin=float(r["margin"]), tol=float(r["tol"]), holds=bool(r["holds"]),
        details={"chain": [float(c) for c in r["chain"]],
                 "link_margins": [float(m) for m in r["link_margins"]],
                 "chain_tol": float(r["chain_tol"])},
    )


def lemma_y1_terms(a, b, c, d) -> dict:
    a, b, c, d = (np.asarray(z, dtype=float) for z in (a, b, c, d))
    if np.any((a <= 0) | (b <= 0) | (c <= 0) | (d <= 0)):
        raise ValueError("lemma_y1 needs positive inputs")
    p, q = (a * d) ** 2, (b * c) ** 2
    quotient = 0.5 * (p - q) ** 2 / (p + q)
    lhs = quotient + (a * a - b * b) * (c * c - d * d)
    rhs = (a * c - b * d) ** 2
    tol = REL_TOL * (1.0 + (a * a + b * b) * (c * c + d * d))
    return {"lhs": lhs, "rhs": rhs, "quotient": quotient, "margin": rhs - lhs, "tol": tol,
            "holds": rhs - lhs >= -tol}


def lemma_y1(a: float, b: float, c: float, d: float) -> InequalityReport:
    r = lemma_y1_terms(a, b, c, d)
    return InequalityReport(
        suite_id="LEMMA_Y1", inputs={"a": a, "b": b, "c": c, "d": d}, lhs=float(r["lhs"]),
        rhs=float(r["rhs"]), margin=float(r["margin"]), tol=float(r["tol"]), holds=bool(r["holds"]),
        details={"quotient": float(r["quotient"])},
    )


def _bounds_arrays(bounds):
    if isinstance(bounds, SpectrumBounds):
        return bounds.m, bounds.M, bounds.n, bounds.N
    m, M, n, N = (np.asarray(z, dtype=float) for z in bounds)
    if np.any(~((0 < m) & (m <= M) & (0 < n) & (n <= N))):
        raise ValueError("need 0 < m <= M and 0 < n <= N")
    return m, M, n, N


def _sandwich(X, lo, hi, name, tol_psd):
    lam = eigvalsh(X)
    scale = 1.0 + np.abs(hi)
    tol = 1e-9 * scale if tol_psd is None else tol_psd
    if np.any(lam[..., 0] < lo - tol) or np.any(lam[..., -1] > hi + tol):
        raise BoundsViolated(f"spectrum of {name} leaves its stated bounds")
    return lam


def _clamp_c(c, width):
    tol = CLAMP_TOL * (1.0 + width**2)
    if np.any(c < -tol):
        raise BoundsViolated("covariance term is negative beyond roundoff")
    return np.maximum(c, 0.0)


def _pair_moments(A, B, x):
    a, b = _ip(A, x).real, _ip(B, x).real
    cov = np.abs(_ip(A @ B, x) - a * b)
    var_a = _ip(A @ A, x).real - a * a
    var_b = _ip(B @ B, x).real - b * b
    return a, b, cov, var_a, var_b


def covariance_terms(A, B, bounds, x) -> CovarianceTerms:
    """``c_A`` and ``c_B`` for one instance."""
    m, M, n, N = _bounds_arrays(bounds)
    A, B = hermitian(A), hermitian(B)
    x = _vectors(x, A.shape[-1])
    I = np.eye(A.shape[-1])
    cA = _clamp_c(_ip((M * I - A) @ (A - m * I), x).real, M - m)
    cB = _clamp_c(_ip((N * I - B) @ (B - n * I), x).real, N - n)
    return CovarianceTerms(float(cA), float(cB))


def thm13_terms(A, B, bounds, x, tol_psd=None) -> dict:
    """Refined operator Gruss bound with each link of its proof isolated.

    Links: ``|cov| <= sqrt(var_A var_B)`` (Cauchy-Schwarz), the variance
    bounds ``var <= (width/2)^2 - c``, and the final step
    ``sqrt((alpha^2/4 - c_A)(beta^2/4 - c_B)) <= bound``, which is where the
    correction quotient enters.
    """
    m, M, n, N = _bounds_arrays(bounds)
    A, B = hermitian(A), hermitian(B)
    if A.shape != B.shape:
        raise DimensionMismatch(f"A {A.shape} and B {B.shape} differ")
    x = _vectors(x, A.shape[-1])
    m_, M_, n_, N_ = (np.asarray(z, dtype=float)[..., None, None] for z in (m, M, n, N))
    _sandwich(A, np.asarray(m), np.asarray(M), "A", tol_psd)
    _sandwich(B, np.asarray(n), np.asarray(N), "B", tol_psd)
    I = np.eye(A.shape[-1])
    alpha, beta = M - m, N - n
    cA = _clamp_c(_ip((M_ * I - A) @ (A - m_ * I), x).real, alpha)
    cB = _clamp_c(_ip((N_ * I - B) @ (B - n_ * I), x).real, beta)
    _, _, cov, var_a, var_b = _pair_moments(A, B, x)

    plain = alpha * beta / 4.0
    denom = 8.0 * (alpha**2 * cB + beta**2 * cA)
    degenerate = denom < DEGENERATE_DENOM * (1.0 + 4.0 * alpha**2 * beta**2)
    quotient = np.where(degenerate, 0.0, (alpha**2 * cB - beta**2 * cA) ** 2 / np.where(degenerate, 1.0, denom))
    correction = np.sqrt(cA * cB) + quotient
    bound = plain - correction

    tol = REL_TOL * (1.0 + plain)
    envelope = np.sqrt(np.maximum((alpha**2 / 4.0 - cA) * (beta**2 / 4.0 - cB), 0.0))
    links = {
        "cauchy_schwarz": np.sqrt(np.maximum(var_a * var_b, 0.0)) - cov,
        "variance_A": alpha**2 / 4.0 - cA - var_a,
        "variance_B": beta**2 / 4.0 - cB - var_b,
        "final_step": bound - envelope,
    }
    margin = bound - cov
    return {
        "lhs": cov, "rhs": bound, "plain": plain, "c_A": cA, "c_B": cB, "quotient": quotient,
        "correction": correction, "margin": margin, "tol": tol, "holds": margin >= -tol,
        "links": links, "correction_nonnegative": correction >= -tol,
        "variance_nonnegative": np.minimum(var_a, var_b) >= -tol,
    }


def _scalarize(d: dict) -> dict:
    out = {}
    for k, v in d.items():
        if isinstance(v, dict):
            out[k] = _scalarize(v)
        elif isinstance(v, (bool, np.bool_)) or (isinstance(v, np.ndarray) and v.dtype == bool):
            out[k] = bool(v)
        else:
            out[k] = float(v)
    return out


def check_thm13(A, B, bounds: SpectrumBounds, x, tol_psd: float | None = None) -> InequalityReport:
    r = thm13_terms(A, B, bounds, x, tol_psd)
    details = _scalarize({k: r[k] for k in ("plain", "c_A", "c_B", "quotient", "correction", "links",
                                              "correction_nonnegative", "variance_nonnegative")})
    details["denominator"] = THM13_DENOMINATOR
    details["failing_links"] = [k for k, v in details["links"].items() if v < -float(r["tol"])]
    return InequalityReport(
        suite_id="THM13", inputs={"n": np.shape(A)[-1], "bounds": _bounds_dict(bounds)},
        lhs=float(r["lhs"]), rhs=float(r["rhs"]), margin=float(r["margin"]), tol=float(r["tol"]),
        refinement_gain=float(r["correction"]), holds=bool(r["holds"]), details=details,
    )


def _bounds_dict(bounds):
    m, M, n, N = _bounds_arrays(bounds)
    return {"m": float(m), "M": float(M), "n": float(n), "N": float(N)}


def gruss_operator_terms(A, B, bounds, x, tol_psd=None) -> dict:
    m, M, n, N = _bounds_arrays(bounds)
    A, B = hermitian(A), hermitian(B)
    if A.shape != B.shape:
        raise DimensionMismatch(f"A {A.shape} and B {B.shape} differ")
    x = _vectors(x, A.shape[-1])
    lam_a = _sandwich(A, np.asarray(m), np.asarray(M), "A", tol_psd)
    lam_b = _sandwich(B, np.asarray(n), np.asarray(N), "B", tol_psd)
    # spectrum of X - cI is lam - c, so the norm comes from the extremes
    norm_a = np.maximum(np.abs(lam_a[..., 0] - (M + m) / 2), np.abs(lam_a[..., -1] - (M + m) / 2))
    norm_b = np.maximum(np.abs(lam_b[..., 0] - (N + n) / 2), np.abs(lam_b[..., -1] - (N + n) / 2))
    _, _, cov, _, _ = _pair_moments(A, B, x)
    mid = norm_a * norm_b
    rhs = (M - m) * (N - n) / 4.0
    tol = REL_TOL * (1.0 + rhs)
    links = np.stack([mid - cov, rhs - mid, (M - m) / 2 - norm_a, (N - n) / 2 - norm_b])
    return {"lhs": cov, "mid": mid, "rhs": rhs, "links": links, "margin": links.min(axis=0),
            "tol": tol, "holds": np.all(links >= -tol, axis=0)}


def check_gruss_operator(A, B, bounds: SpectrumBounds, x, tol_psd: float | None = None) -> InequalityReport:
    r = gruss_operator_terms(A, B, bounds, x, tol_psd)
    return InequalityReport(
        suite_id="GRUSS_OP", inputs={"n": np.shape(A)[-1], "bounds": _bounds_dict(bounds)},
        lhs=float(r["lhs"]), rhs=float(r["rhs"]), margin=float(r["margin"]), tol=float(r["tol"]),
        holds=bool(r["holds"]),
        details={"mid": float(r["mid"]), "link_margins": [float(v) for v in r["links"]]},
    )
