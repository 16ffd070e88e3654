import math

import numpy as np
import pytest

from grusslab.errors import DomainViolation
from grusslab.means import MeanParams
from grusslab.operator_suites import (
    OPERATOR_DOMAIN,
    OPERATOR_SUITES,
    SCALAR_COUNTERPART,
    check_operator_refinement,
    operator_terms,
)
from grusslab.opmeans import PositivePair
from grusslab.scalar_suites import check_scalar_refinement, scalar_terms
from grusslab.weights import ALL_WEIGHT_NAMES, weight

from conftest import random_pd, random_unitary


def g_for(suite, name="exp"):
    return weight("affine" if suite == "OP_ENTROPY" else name, *OPERATOR_DOMAIN[suite])


@pytest.mark.parametrize("suite", OPERATOR_SUITES)
def test_equal_pair_gives_zero_margin(rng, suite):
    A = random_pd(rng, 3)
    r = check_operator_refinement(suite, PositivePair(A, A), MeanParams(v=0.3), g_for(suite))
    assert abs(r.margin) <= r.tol
    assert r.holds


def test_heron_commuting_example():
    pair = PositivePair(np.eye(2), np.diag([4.0, 9.0]))
    r = operator_terms("OP_HERON", pair, 0.5, weight("identity"))
    scal = [check_scalar_refinement("THM1", 1.0, b, 0.5, weight("identity")) for b in (4.0, 9.0)]
    assert np.allclose(np.diag(r["rhs"] - r["lhs"]).real, [s.margin for s in scal], atol=1e-12)
    assert np.allclose(r["margins"], sorted(s.margin for s in scal), atol=1e-12)


def test_entropy_scalar_oracle():
    pair = PositivePair(np.eye(2), math.e * np.eye(2))
    r = operator_terms("OP_ENTROPY", pair, s=1.0)
    assert np.allclose(r["lhs"], 1.23732301092737 * np.eye(2), atol=1e-12)
    assert np.allclose(r["rhs"], (math.e - 1) * np.eye(2), atol=1e-12)
    assert np.allclose(r["unrefined"], np.eye(2), atol=1e-12)
    assert r["holds"]


@pytest.mark.parametrize("suite", OPERATOR_SUITES)
@pytest.mark.parametrize("gname", ALL_WEIGHT_NAMES)
def test_commuting_reduction(rng, suite, gname):
    n = 4
    U = random_unitary(rng, n)
    a, b = rng.uniform(0.1, 10, n), rng.uniform(0.1, 10, n)
    pair = PositivePair((U * a) @ U.conj().T, (U * b) @ U.conj().T)
    v, s = 0.3, 0.5
    g = g_for(suite, gname)
    r = operator_terms(suite, pair, v, g, s)
    scalar_suite = SCALAR_COUNTERPART[suite]
    sg = weight("affine") if scalar_suite == "ENTROPY" else g
    sc = scalar_terms(scalar_suite, a, b, v, sg, s=s)
    scale = 1 + np.linalg.norm(pair.A) + np.linalg.norm(pair.B)
    assert np.allclose(r["margins"], np.sort(sc["margin"]), atol=1e-9 * scale)
    D = U.conj().T @ r["lhs"] @ U
    assert np.allclose(D, np.diag(sc["lhs"]), atol=1e-9 * scale)


@pytest.mark.parametrize("suite", OPERATOR_SUITES)
def test_random_pairs_hold(rng, suite):
    for n in (2, 3, 5):
        for _ in range(3):
            pair = PositivePair(random_pd(rng, n), random_pd(rng, n))
            r = check_operator_refinement(suite, pair, MeanParams(v=0.7), g_for(suite), s=0.1)
            assert r.holds, r
            assert r.refinement_gain >= -r.tol


def test_batched_with_per_instance_parameters_matches_single(rng):
    As = np.stack([random_pd(rng, 3) for _ in range(4)])
    Bs = np.stack([random_pd(rng, 3) for _ in range(4)])
    v = np.array([0.0, 0.25, 0.75, 1.0])
    names = ["identity", "affine", "power", "exp"]
    for suite in ("OP_HERON", "OP_POWER_AG", "OP_POWER_HG", "OP_HEINZ_LOG"):
        gs = [weight(nm, *OPERATOR_DOMAIN[suite]) for nm in names]
        r = operator_terms(suite, PositivePair(As, Bs), v, gs)
        for i in range(4):
            ri = operator_terms(suite, PositivePair(As[i], Bs[i]), v[i], gs[i])
            assert r["min_eig_diff"][i] == pytest.approx(float(ri["min_eig_diff"]), abs=1e-12)


def test_tolerance_adds_quadrature_error(rng):
    pair = PositivePair(random_pd(rng, 3), random_pd(rng, 3))
    r = check_operator_refinement("OP_POWER_AG", pair, MeanParams(v=0.5), g_for("OP_POWER_AG"), tol_psd=1e-7)
    assert r.tol == pytest.approx(1e-7 + r.quadrature_error)
    assert r.details["tol_psd"] == 1e-7


def test_heinz_log_reports_printed_form_difference(rng):
    pair = PositivePair(random_pd(rng, 3), random_pd(rng, 3))
    r = check_operator_refinement("OP_HEINZ_LOG", pair, g=g_for("OP_HEINZ_LOG"))
    assert r.details["printed_form_diff"] <= 1e-9


def test_validation(rng):
    pair = PositivePair(random_pd(rng, 2), random_pd(rng, 2))
    with pytest.raises(ValueError):
        check_operator_refinement("OP_HERON", pair, g=weight("exp", 0.5, 1.0))
    with pytest.raises(ValueError):
        check_operator_refinement("OP_HERON", pair)
    with pytest.raises(ValueError):
        check_operator_refinement("OP_ENTROPY", pair, s=0.0)
    with pytest.raises(ValueError):
        check_operator_refinement("OP_NOSUCH", pair, g=weight("exp"))
    with pytest.raises(ValueError):
        operator_terms("OP_HERON", pair, 1.5, weight("exp"))
    with pytest.raises(DomainViolation):
        PositivePair(np.eye(2), -np.eye(2))


@pytest.mark.parametrize("suite", OPERATOR_SUITES)
def test_shared_weight_on_stack(rng, suite):
    A = np.stack([random_pd(rng, 3) for _ in range(4)])
    B = np.stack([random_pd(rng, 3) for _ in range(4)])
    g = g_for(suite)
    shared = operator_terms(suite, PositivePair(A, B), 0.3, g, 0.5)
    listed = operator_terms(suite, PositivePair(A, B), 0.3, [g] * 4, 0.5)
    assert np.allclose(shared["margins"], listed["margins"], atol=1e-12)
