import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60, derandomize=True)
settings.load_profile("default")


def random_unitary(rng, n):
    Z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    Q, R = np.linalg.qr(Z)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def random_pd(rng, n, lo=0.1, hi=10.0):
    U = random_unitary(rng, n)
    return (U * rng.uniform(lo, hi, n)) @ U.conj().T


def random_hermitian(rng, n):
    Z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return 0.5 * (Z + Z.conj().T)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
