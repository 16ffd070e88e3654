"""Seeded random instances built only on :mod:`grusslab.prng`.

Every generator is a pure function of ``(seed, dim, index)``. ``index``
selects a disjoint family of PRNG streams so one trial seed can yield
several independent objects (e.g. the two matrices of a pair).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hermitian import hermitize
from .opmeans import PositivePair
from .prng import CounterRNG

MAX_DIM = 64
_MASK = (1 << 64) - 1

# Stream offsets inside one index family.
_BASIS, _SPECTRUM, _VECTOR, _COMPLEX, _SCALARS = range(5)
_FAMILY = 8


def _stream(index: int, kind: int) -> int:
    return _FAMILY * index + kind


def trial_seed(seed: int, trial: int) -> int:
    """Per-trial seed ``seed XOR trial``."""
    return (seed ^ trial) & _MASK


@dataclass(frozen=True)
class InstanceConfig:
    dim: int
    seed: int
    spectrum_lo: float = 0.1
    spectrum_hi: float = 10.0
    include_endpoints: bool = False

    def __post_init__(self):
        if not 1 <= self.dim <= MAX_DIM:
            raise ValueError(f"dim must lie in [1, {MAX_DIM}]")
        if not 0 <= self.seed <= _MASK:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if not (np.isfinite(self.spectrum_lo) and np.isfinite(self.spectrum_hi)):
            raise ValueError("spectrum bounds must be finite")
        if not 0 < self.spectrum_lo <= self.spectrum_hi:
            raise ValueError("need 0 < spectrum_lo <= spectrum_hi")


def _gaussian_matrix(rng: CounterRNG, n: int) -> np.ndarray:
    return rng.complex_normal((n, n))


def haar_unitary(dim: int, seed: int, index: int = 0) -> np.ndarray:
    """Unitary from two passes of modified Gram-Schmidt on a complex Gaussian matrix."""
    Z = _gaussian_matrix(CounterRNG(seed, _stream(index, _BASIS)), dim)
    Q = Z.copy()
    for _ in range(2):
        for j in range(dim):
            for i in range(j):
                Q[:, j] -= np.vdot(Q[:, i], Q[:, j]) * Q[:, i]
            Q[:, j] /= np.linalg.norm(Q[:, j])
    return Q


def _spectrum(cfg: InstanceConfig, index: int) -> np.ndarray:
    rng = CounterRNG(cfg.seed, _stream(index, _SPECTRUM))
    lam = rng.uniform(cfg.dim, cfg.spectrum_lo, cfg.spectrum_hi)
    if cfg.include_endpoints and cfg.dim >= 2:
        lam[0], lam[1] = cfg.spectrum_lo, cfg.spectrum_hi
    return lam


def gen_pd(cfg: InstanceConfig, index: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """``U diag(lam) U*`` and its exact eigenvalues, sorted ascending."""
    U = haar_unitary(cfg.dim, cfg.seed, index)
    lam = _spectrum(cfg, index)
    return hermitize((U * lam) @ U.conj().T), np.sort(lam)


def gen_commuting_pair(cfg: InstanceConfig, cfg_b: InstanceConfig | None = None,
                       index: int = 0) -> tuple[PositivePair, np.ndarray, np.ndarray, np.ndarray]:
    """Pair sharing the eigenbasis of ``cfg``; B's spectrum is drawn from ``cfg_b``.

    Returns ``(pair, U, lam_a, lam_b)`` with ``A = U diag(lam_a) U*`` and
    ``B = U diag(lam_b) U*``; the eigenvalues are in basis order.
    """
    cfg_b = cfg if cfg_b is None else cfg_b
    if cfg_b.dim != cfg.dim:
        raise ValueError("commuting pair needs equal dimensions")
    U = haar_unitary(cfg.dim, cfg.seed, index)
    lam_a = _spectrum(cfg, index)
    lam_b = _spectrum(cfg_b, index)
    Uh = U.conj().T
    pair = PositivePair(hermitize((U * lam_a) @ Uh), hermitize((U * lam_b) @ Uh))
    return pair, U, lam_a, lam_b


def gen_unit_vector(dim: int, seed: int, index: int = 0) -> np.ndarray:
    """Complex Gaussian vector normalized to unit length."""
    if dim < 1:
        raise ValueError("dim must be positive")
    z = CounterRNG(seed, _stream(index, _VECTOR)).complex_normal((dim,))
    return z / np.linalg.norm(z)


def gen_complex(dim: int, seed: int, scale: float = 1.0, index: int = 0) -> np.ndarray:
    """Matrix of i.i.d. standard complex Gaussians times ``scale``."""
    if dim < 1:
        raise ValueError("dim must be positive")
    return scale * _gaussian_matrix(CounterRNG(seed, _stream(index, _COMPLEX)), dim)


def gen_scalars(seed: int, k: int, lo: float, hi: float, log: bool = False, index: int = 0) -> np.ndarray:
    """``k`` uniform (or log-uniform) reals in ``[lo, hi]``."""
    rng = CounterRNG(seed, _stream(index, _SCALARS))
    if log:
        return np.exp(rng.uniform(k, np.log(lo), np.log(hi)))
    return rng.uniform(k, lo, hi)
