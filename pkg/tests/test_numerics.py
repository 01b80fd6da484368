import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special

from psc_auctions.exceptions import BracketFailure, NonFinite, OutOfRange
from psc_auctions.numerics import (RandomStream, gauss_legendre, integrate_1d, monotone_interpolate,
                                   solve_monotone_root)


@given(root=st.floats(-50, 50), hint=st.floats(-50, 50), slope=st.floats(0.01, 100))
@settings(max_examples=200, deadline=None)
def test_root_of_decreasing_line(root, hint, slope):
    got = solve_monotone_root(lambda b: slope * (root - b), hint, 1e-11)
    assert abs(got - root) <= 1e-10


def test_root_vectorised_and_cubic():
    targets = np.array([-2.0, 0.0, 0.3, 8.0])
    got = solve_monotone_root(lambda b: targets - b ** 3, np.zeros(4), 1e-13)
    np.testing.assert_allclose(got, np.cbrt(targets), atol=1e-12)
    assert isinstance(solve_monotone_root(lambda b: 1 - b, 0.0), float)


def test_root_explicit_bracket_without_sign_change():
    with pytest.raises(BracketFailure):
        solve_monotone_root(lambda b: 1.0 - b, 0.0, lo=2.0, hi=3.0)


def test_root_no_sign_change_anywhere():
    with pytest.raises(BracketFailure):
        solve_monotone_root(lambda b: np.ones_like(b), 0.0, max_expansions=10)


def test_root_non_finite_target():
    with pytest.raises(NonFinite):
        solve_monotone_root(lambda b: np.full_like(b, np.nan), 0.0)


def test_root_rejects_bad_tolerance():
    with pytest.raises(ValueError):
        solve_monotone_root(lambda b: -b, 0.0, abs_tol=0.0)


@pytest.mark.parametrize("n", [1, 4, 17, 64])
def test_gauss_legendre_matches_scipy(n):
    x, w = gauss_legendre(n)
    xs, ws = special.roots_legendre(n)
    np.testing.assert_allclose(x, xs, atol=1e-13)
    np.testing.assert_allclose(w, ws, atol=1e-13)
    with pytest.raises(ValueError):
        x[0] = 0.0


def test_gauss_legendre_rejects_zero_nodes():
    with pytest.raises(ValueError):
        gauss_legendre(0)


@pytest.mark.parametrize("f,a,b", [(np.exp, 0.0, 1.0), (np.sin, -1.0, 2.5),
                                   (lambda x: 1.0 / (1.0 + x * x), -3.0, 3.0)])
def test_integrate_matches_scipy_quad(f, a, b):
    ref, _ = integrate.quad(f, a, b, epsabs=1e-13)
    assert integrate_1d(f, a, b, adaptive=True, tol=1e-12) == pytest.approx(ref, abs=1e-11)


def test_integrate_warns_when_not_converged():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        integrate_1d(np.sqrt, 0.0, 1.0, adaptive=True, tol=1e-15, max_nodes=64)
    assert any(issubclass(w.category, RuntimeWarning) for w in caught)


def test_monotone_interpolate_exact_at_nodes_and_monotone():
    gy = np.linspace(0, 1, 11)
    gb = gy ** 2
    np.testing.assert_allclose(monotone_interpolate(gy, gb, gy), gb)
    q = np.linspace(0, 1, 501)
    assert np.all(np.diff(monotone_interpolate(gy, gb, q)) >= 0)
    with pytest.raises(OutOfRange):
        monotone_interpolate(gy, gb, 1.01)
    with pytest.raises(ValueError):
        monotone_interpolate(gy, gb[::-1], 0.5)


def test_random_stream_replay_and_independence():
    a = RandomStream(5, 1).random(1000)
    b = RandomStream(5, 1).random(1000)
    c = RandomStream(5, 2).random(1000)
    np.testing.assert_array_equal(a, b)
    assert abs(np.corrcoef(a, c)[0, 1]) < 0.15
    s = RandomStream(5, 1)
    np.testing.assert_array_equal(s.child(3).random(10), RandomStream(5, 1).child(3).random(10))
    assert not np.array_equal(s.child(3).random(10), s.child(4).random(10))
    u = s.uniform(2.0, 3.0, 100)
    assert np.all((u >= 2.0) & (u < 3.0))
