import numpy as np
import pytest
from scipy import integrate

from psc_auctions import SharingContract, equilibrium_strategy_sp
from psc_auctions import auctions as A
from psc_auctions.exceptions import NonTermination
from psc_auctions.numerics import RandomStream


def posc_integrals(a):
    """dblquad oracle for the two revenue integrals of example 1 under posc."""
    def pay(y2):
        return (1 - a) * y2 / (1 - a * y2)
    s1 = integrate.dblquad(lambda y2, y1: 2 * pay(y2), 0, 1, 0, lambda y1: y1, epsabs=1e-12)[0]
    s2 = integrate.dblquad(lambda y2, y1: 2 * a * (2 * y1 + y2) / 3 * (1 - pay(y2)),
                           0, 1, 0, lambda y1: y1, epsabs=1e-12)[0]
    return s1, s2


@pytest.mark.parametrize("a", [0.1, 0.5, 0.9])
def test_example1_posc_closed_form_matches_dblquad(a):
    s1, s2 = posc_integrals(a)
    got = A.revenue_closed_form_example1("posc", a)
    assert got.stage1 == pytest.approx(s1, abs=1e-10)
    assert got.stage2 == pytest.approx(s2, abs=1e-10)
    assert got.estimator == A.CLOSED and got.stderr_total == 0.0


@pytest.mark.parametrize("a", [0.0, 0.3, 0.7])
def test_example1_plsc_closed_form(a):
    r = A.revenue_closed_form_example1("plsc", a)
    assert r.total == pytest.approx(1 / 3 + 2 * a / 9, abs=1e-12)
    assert A.revenue_closed_form_example1("one_time").total == pytest.approx(1 / 3, abs=1e-12)


def test_quadrature_matches_closed_form(ex1, lin):
    for c in (SharingContract.posc(0.4), SharingContract.plsc(0.4)):
        q = A.revenue_quadrature(ex1, lin, c)
        exact = A.revenue_closed_form_example1(c.kind, c.alpha)
        assert q.total == pytest.approx(exact.total, abs=1e-10)


def test_second_price_accounting(ex1, lin):
    c = SharingContract.posc(0.5)
    out = A.run_second_price(ex1, equilibrium_strategy_sp(ex1, lin, c), c, RandomStream(1), count=5000)
    assert len(out) == 5000
    np.testing.assert_allclose(out.auction_payment + out.sharing_payment + out.buyer_total_profit,
                               out.realized_value, atol=1e-12)
    assert np.all(out.sharing_payment >= 0)


def test_second_price_winner_and_price(ex1, lin):
    c = SharingContract.plsc(0.3)
    strat = equilibrium_strategy_sp(ex1, lin, c)
    out = A.run_second_price(ex1, strat, c, RandomStream(2), signals=np.array([[0.2, 0.7]]))
    assert int(out.winner_index[0]) == 1
    assert out.auction_payment[0] == pytest.approx(0.2, abs=1e-6)


def test_english_direct_payment(cv3, lin):
    out = A.english_payment_direct(cv3, lin, SharingContract.plsc(0.5), np.array([[0.3, 0.9, 0.6]]))
    assert int(out.winner_index[0]) == 1
    assert out.auction_payment[0] == pytest.approx(0.5, abs=1e-9)


def test_english_clock_small_batch(cv3, lin):
    sig = RandomStream(3).rng.random((40, 3))
    c = SharingContract.posc(0.5)
    clock = A.run_english_clock(cv3, lin, c, sig, 1e-4)
    direct = A.english_payment_direct(cv3, lin, c, sig)
    np.testing.assert_array_equal(clock.winner_index, direct.winner_index)
    np.testing.assert_allclose(clock.auction_payment, direct.auction_payment, atol=1e-4)


def test_english_clock_rejects_huge_step(cv3, lin):
    with pytest.raises((NonTermination, ValueError)):
        A.run_english_clock(cv3, lin, SharingContract.plsc(0.5), np.array([[0.2, 0.5, 0.8]]), 0.0)


def test_mc_revenue_agrees_with_closed_form(ex1, lin):
    c = SharingContract.posc(0.5)
    mc = A.estimate_revenue(ex1, lin, c, A.SECOND_PRICE, 100_000, RandomStream(4))
    exact = A.revenue_closed_form_example1("posc", 0.5)
    assert abs(mc.total - exact.total) <= 3 * mc.stderr_total
    assert mc.n_samples == 100_000 and mc.estimator == A.MC


def test_common_random_numbers_are_reproducible(ex1, lin):
    cs = [SharingContract.posc(0.5), SharingContract.plsc(0.5)]
    r1 = A.compare_contracts_paired(ex1, lin, cs, n=20_000, seed=9)
    r2 = A.compare_contracts_paired(ex1, lin, cs, n=20_000, seed=9)
    d1, d2 = r1.difference("posc(0.5)", "plsc(0.5)"), r2.difference("posc(0.5)", "plsc(0.5)")
    assert d1 == d2
    # pairing makes the difference far less noisy than either total
    assert d1.stderr < 0.5 * r1.breakdowns["posc(0.5)"].stderr_total
    assert r1.ranking() == ["plsc(0.5)", "posc(0.5)"]


def test_compare_needs_two_contracts(ex1, lin):
    with pytest.raises(ValueError):
        A.compare_contracts_paired(ex1, lin, [SharingContract.posc(0.5)], n=10)
