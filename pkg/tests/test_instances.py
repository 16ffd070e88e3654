import numpy as np
import pytest

from grusslab.hermitian import loewner_leq
from grusslab.instances import (
    InstanceConfig,
    gen_commuting_pair,
    gen_complex,
    gen_pd,
    gen_scalars,
    gen_unit_vector,
    haar_unitary,
    trial_seed,
)
from grusslab.means import geom
from grusslab.opmeans import op_geom


def test_dim_one():
    A, lam = gen_pd(InstanceConfig(1, 3, 0.5, 2.0))
    assert A.shape == (1, 1)
    assert 0.5 <= lam[0] <= 2.0
    assert A[0, 0] == pytest.approx(lam[0])


@pytest.mark.parametrize("dim", [2, 3, 8, 17])
def test_endpoints_pinned(dim):
    A, lam = gen_pd(InstanceConfig(dim, 11, 0.25, 4.0, include_endpoints=True))
    assert lam[0] == 0.25 and lam[-1] == 4.0
    assert np.allclose(np.linalg.eigvalsh(A), lam, atol=1e-12 * 4)


@pytest.mark.parametrize("seed", range(10))
def test_spectrum_containment(seed):
    cfg = InstanceConfig(5, seed, 0.1, 10.0)
    A, lam = gen_pd(cfg)
    assert loewner_leq(0.1 * np.eye(5), A).holds
    assert loewner_leq(A, 10.0 * np.eye(5)).holds
    assert np.all((lam >= 0.1) & (lam <= 10.0))


def test_haar_unitary_is_unitary():
    for n in (1, 4, 32):
        U = haar_unitary(n, 5)
        assert np.linalg.norm(U.conj().T @ U - np.eye(n)) <= 1e-13 * n


def test_reproducible_bits():
    cfg = InstanceConfig(6, 2**63 + 17)
    A1, l1 = gen_pd(cfg)
    A2, l2 = gen_pd(cfg)
    assert A1.tobytes() == A2.tobytes() and l1.tobytes() == l2.tobytes()
    assert not np.array_equal(gen_pd(cfg, 0)[0], gen_pd(cfg, 1)[0])


def test_frozen_corpus_value():
    # guards the documented generator against silent changes
    _, lam = gen_pd(InstanceConfig(4, 7, include_endpoints=True))
    assert lam[1] == pytest.approx(6.30180393, abs=1e-8)
    assert lam[2] == pytest.approx(7.27249865, abs=1e-8)


def test_commuting_pair():
    cfg = InstanceConfig(2, 42)
    pair, U, la, lb = gen_commuting_pair(cfg, InstanceConfig(2, 43, 1.0, 5.0))
    A, B = pair.A, pair.B
    assert np.linalg.norm(A @ B - B @ A) <= 1e-11 * np.linalg.norm(A) * np.linalg.norm(B)
    G = op_geom(pair, 0.5)
    assert np.allclose(G, (U * geom(la, lb, 0.5)) @ U.conj().T, atol=1e-10)
    same, *_ = gen_commuting_pair(cfg, cfg)
    assert np.array_equal(same.A, same.B)
    with pytest.raises(ValueError):
        gen_commuting_pair(cfg, InstanceConfig(3, 1))


def test_unit_vector_and_complex():
    x = gen_unit_vector(7, 9)
    assert abs(np.linalg.norm(x) - 1) <= 1e-12
    assert np.array_equal(x, gen_unit_vector(7, 9))
    assert not np.array_equal(x, gen_unit_vector(7, 10))
    T = gen_complex(5, 3, scale=2.0)
    assert np.array_equal(T, 2.0 * gen_complex(5, 3))
    assert np.iscomplexobj(T) and np.abs(T.imag).sum() > 0
    with pytest.raises(ValueError):
        gen_unit_vector(0, 1)


def test_scalars():
    s = gen_scalars(1, 1000, 1e-3, 1e3, log=True)
    assert s.min() >= 1e-3 and s.max() <= 1e3
    assert abs(np.mean(np.log10(s))) < 0.2


def test_trial_seed():
    assert trial_seed(1, 3) == 2
    assert trial_seed(2**64 - 1, 1) == 2**64 - 2


def test_config_validation():
    for bad in (dict(dim=0, seed=1), dict(dim=65, seed=1), dict(dim=2, seed=-1),
                dict(dim=2, seed=1, spectrum_lo=0.0), dict(dim=2, seed=1, spectrum_lo=3.0, spectrum_hi=2.0)):
        with pytest.raises(ValueError):
            InstanceConfig(**bad)
