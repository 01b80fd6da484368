import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from psc_auctions import SharingContract, check_admissible, make_contract
from psc_auctions.contracts import marginal_slope_bound

alphas = st.floats(0.0, 0.99)
profits = st.floats(-10, 10)


@given(alphas, profits)
def test_posc_and_plsc_payments(a, w):
    assert SharingContract.posc(a).payment(w) == pytest.approx(a * max(w, 0.0))
    assert SharingContract.plsc(a).payment(w) == pytest.approx(a * w)
    assert SharingContract.one_time().payment(w) == 0.0


@given(st.floats(0.01, 0.99))
def test_posc_and_plsc_admissible(a):
    assert check_admissible(SharingContract.posc(a)).ok
    assert check_admissible(SharingContract.plsc(a)).ok


@given(st.floats(0.0, 0.99), profits, st.floats(1e-3, 5))
def test_winner_keeps_more_of_higher_profit(a, w, d):
    for c in (SharingContract.posc(a), SharingContract.plsc(a)):
        assert (w + d - c.payment(w + d)) > (w - c.payment(w))
        assert c.payment(w + d) - c.payment(w) <= marginal_slope_bound(c) * d + 1e-12


def test_general_rule_interpolates_and_extrapolates():
    c = SharingContract.general([-1, 0, 0.5, 1], [-0.1, 0, 0.2, 0.3])
    np.testing.assert_allclose(c.slopes(), [0.1, 0.4, 0.2])
    np.testing.assert_allclose(c.payment([-2, -0.5, 0.25, 0.75, 3]), [-0.2, -0.05, 0.1, 0.25, 0.7])
    assert marginal_slope_bound(c) == pytest.approx(0.4)
    np.testing.assert_array_equal(c.kinks(), [-1, 0, 0.5, 1])
    assert check_admissible(c).ok


def test_violations_are_labelled():
    assert set(check_admissible(SharingContract.one_time()).violations) == {"ii"}
    assert "ii" in check_admissible(SharingContract.posc(0.0)).violations
    steep = SharingContract.general([-1, 0, 1], [-0.5, 0, 1.5])
    assert "i" in check_admissible(steep).violations
    shifted = SharingContract.general([-1, 0, 1], [0.0, 0.1, 0.4])
    assert "ii" in check_admissible(shifted).violations
    falling = SharingContract.general([-1, 0, 1], [0.2, 0.0, 0.3])
    assert "i" in check_admissible(falling).violations


@pytest.mark.parametrize("bad", [-0.1, 1.0, float("nan")])
def test_alpha_range(bad):
    with pytest.raises(ValueError):
        SharingContract.posc(bad)


def test_general_validation():
    with pytest.raises(ValueError):
        SharingContract.general([0, 0], [0, 1])
    with pytest.raises(ValueError):
        SharingContract.general([0], [0])


def test_make_contract():
    assert make_contract("posc", 0.3) == SharingContract.posc(0.3)
    assert make_contract({"kind": "plsc", "alpha": 0.2}) == SharingContract.plsc(0.2)
    assert make_contract({"kind": "one_time"}) == SharingContract.one_time()
    with pytest.raises(ValueError):
        make_contract({"kind": "general"})
    with pytest.raises(ValueError):
        make_contract("royalty")
