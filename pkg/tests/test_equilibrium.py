import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import brentq
from sklearn.base import clone

from psc_auctions import (BidFunction, SharingContract, Utility, bid_eng, bid_general_sp, bid_plsc_sp,
                          bid_posc_sp, english_strategy, equilibrium_strategy_sp, invert_drop_prices)
from psc_auctions.equilibrium import bid_sp, infer_signal_from_drop
from psc_auctions.exceptions import InadmissibleContract, OutOfRange

unit = st.floats(0.001, 0.999)


def bernoulli_oracle(p, u, contract):
    """Independent root of the indifference equation for a 0/1 value."""
    def excess(b):
        up, down = 1.0 - b, -b
        return (p * float(u(up - contract.payment(up)))
                + (1 - p) * float(u(down - contract.payment(down))))
    return brentq(excess, -1.0, 2.0, xtol=1e-14)


@given(y=unit, z=unit, a=st.floats(0.0, 0.95))
@settings(max_examples=150, deadline=None)
def test_posc_bid_closed_form(ex1, lin, y, z, a):
    p = 2 * y + z
    assert bid_posc_sp(ex1, lin, a, y, z) == pytest.approx((1 - a) * p / (3 - a * p), abs=1e-9)


@given(y=unit, z=unit, a=st.floats(0.0, 0.95), kind=st.sampled_from(["posc", "plsc"]))
@settings(max_examples=80, deadline=None)
def test_cara_bids_match_brentq(ex1, cara, y, z, a, kind):
    c = SharingContract.posc(a) if kind == "posc" else SharingContract.plsc(a)
    ref = bernoulli_oracle((2 * y + z) / 3, cara, c)
    assert bid_sp(ex1, cara, c, y, z) == pytest.approx(ref, abs=1e-9)


def test_general_bid_matches_brentq(ex1, lin):
    c = SharingContract.general([-1, 0, 0.5, 1], [-0.1, 0, 0.2, 0.3])
    for y, z in ((0.2, 0.1), (0.7, 0.5), (0.95, 0.9)):
        ref = bernoulli_oracle((2 * y + z) / 3, lin, c)
        assert bid_general_sp(ex1, lin, c, y, z) == pytest.approx(ref, abs=1e-9)


def test_plsc_bid_is_conditional_mean_for_linear_utility(ex1, ex2, lin):
    y, z = np.linspace(0.05, 0.95, 7), np.linspace(0.01, 0.9, 7)
    np.testing.assert_allclose(bid_plsc_sp(ex1, lin, 0.6, y, z), (2 * y + z) / 3, atol=1e-9)
    np.testing.assert_allclose(bid_plsc_sp(ex2, lin, 0.3, y, z), (y + z) / 2, atol=1e-9)


@given(y=unit, z=unit, a=st.floats(0.0, 0.9), d=st.floats(0.01, 0.3))
@settings(max_examples=60, deadline=None)
def test_bid_orderings_cara(ex1, cara, y, z, a, d):
    # strictly concave utility: posc bid falls and plsc bid rises with the share fraction
    a2 = min(a + d, 0.95)
    assert bid_posc_sp(ex1, cara, a2, y, z) < bid_posc_sp(ex1, cara, a, y, z)
    assert bid_plsc_sp(ex1, cara, a2, y, z) > bid_plsc_sp(ex1, cara, a, y, z)
    assert bid_posc_sp(ex1, cara, a, y, z) <= bid_plsc_sp(ex1, cara, a, y, z) + 1e-12


def test_inadmissible_general_rule_refused(ex1, lin):
    steep = SharingContract.general([-1, 0, 1], [-1.5, 0, 1.5])
    with pytest.raises(InadmissibleContract):
        bid_general_sp(ex1, lin, steep, 0.5, 0.5)


def test_two_buyer_english_equals_second_price(ex1, cara):
    y, z = np.linspace(0.05, 0.95, 9), np.linspace(0.9, 0.1, 9)
    for c in (SharingContract.posc(0.4), SharingContract.plsc(0.4)):
        np.testing.assert_allclose(bid_eng(ex1, cara, c, y, z[:, None]), bid_sp(ex1, cara, c, y, z),
                                   atol=1e-10)


def test_common_value_english_bid_is_the_value(cv3, cara):
    # with all signals known the value is deterministic, so the indifference bid is the value
    for c in (SharingContract.posc(0.5), SharingContract.plsc(0.5), SharingContract.one_time()):
        assert bid_eng(cv3, cara, c, 0.9, [0.6, 0.3]) == pytest.approx(0.6, abs=1e-9)


def test_drop_price_inversion(cv3, lin):
    c = SharingContract.posc(0.5)
    p1 = english_strategy(cv3, lin, c, 3, np.array([0.3]), np.empty((1, 0)))
    assert float(p1[0]) == pytest.approx(0.3, abs=1e-9)
    assert float(infer_signal_from_drop(cv3, lin, c, 3, p1)[0]) == pytest.approx(0.3, abs=1e-9)
    p2 = english_strategy(cv3, lin, c, 2, np.array([0.6]), np.array([[0.3]]))
    q = invert_drop_prices(cv3, lin, c, np.array([[p1[0], p2[0]]]))
    np.testing.assert_allclose(q, [[0.3, 0.6]], atol=1e-9)


def test_bid_function_estimator(ex1, lin):
    est = BidFunction(ex1, lin, SharingContract.posc(0.5), grid_nodes=128)
    params = est.get_params()
    assert params["grid_nodes"] == 128 and params["cost"] is None
    twin = clone(est)
    assert twin.get_params()["contract"] == SharingContract.posc(0.5)
    est.fit()
    y = np.linspace(0, 1, 37)
    exact = 0.5 * 3 * y / (3 - 0.5 * 3 * y)
    np.testing.assert_allclose(est.predict(y), exact, atol=5e-5)
    np.testing.assert_allclose(est(y[::6]), est.predict(y[::6]))
    with pytest.raises(OutOfRange):
        est.predict(1.5)


def test_unfitted_bid_function(ex1, lin):
    from sklearn.exceptions import NotFittedError

    with pytest.raises(NotFittedError):
        BidFunction(ex1, lin, SharingContract.plsc(0.2)).predict([0.5])


def test_equilibrium_strategy_is_monotone(cv3, cara):
    f = equilibrium_strategy_sp(cv3, cara, SharingContract.plsc(0.5), grid_nodes=64)
    assert np.all(np.diff(f.bids_) >= 0)
    assert f.bids_[-1] <= 1.0 + 1e-9
