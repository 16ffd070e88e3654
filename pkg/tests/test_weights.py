import numpy as np
import pytest

from grusslab.weights import ALL_WEIGHT_NAMES, DOMAINS, MonotoneWeight, WeightKind, weight


@pytest.mark.parametrize("name", ALL_WEIGHT_NAMES)
@pytest.mark.parametrize("dom", list(DOMAINS.values()))
def test_every_named_weight_is_valid_on_every_domain(name, dom):
    g = weight(name, *dom)
    ts = np.linspace(*dom, 101)
    assert np.all(np.diff(g(ts)) >= 0)
    assert g.spread > 0
    assert g.spread == pytest.approx(g(dom[1]) - g(dom[0]))


def test_values_and_names():
    assert weight("identity")(0.3) == pytest.approx(0.3)
    assert weight("affine")(0.3) == pytest.approx(0.6)
    assert weight("exp")(0.0) == pytest.approx(1.0)
    assert weight("power")(0.5) == pytest.approx(0.125)
    assert weight("power2").name == "power2"
    assert weight("POWER").name == "power3"


def test_rejects_non_monotone_and_constant():
    with pytest.raises(ValueError):
        weight("power2", -1.0, 0.0)  # t^2 decreases on [-1, 0]
    with pytest.raises(ValueError):
        MonotoneWeight(WeightKind.POWER, 0.0, 1.0, k=0.0)
    with pytest.raises(ValueError):
        weight("power0.5", -1.0, 0.0)  # undefined for t < 0
    with pytest.raises(ValueError):
        weight("nosuch")
    with pytest.raises(ValueError):
        MonotoneWeight(WeightKind.EXP, 1.0, 0.0)


def test_degenerate_weight_allowed_when_unchecked():
    g = MonotoneWeight(WeightKind.POWER, 0.0, 1.0, k=0.0, check=False)
    assert g.spread == 0.0
    assert np.all(g(np.linspace(0, 1, 5)) == 1.0)


def test_on_rebinds_domain():
    g = weight("exp").on(0.5, 1.0)
    assert (g.lo, g.hi) == (0.5, 1.0)
    assert g.g_lo == pytest.approx(np.exp(0.5))
