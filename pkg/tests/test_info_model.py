import numpy as np
import pytest

from psc_auctions import CustomModel, make_model
from psc_auctions.info_model import check_positive_dependence, cond_expect_full, cond_expect_pair
from psc_auctions.laws import UniformLaw
from psc_auctions.numerics import RandomStream


@pytest.mark.parametrize("name,kw", [("example1", {}), ("example2_pa", {}),
                                     ("common_value_avg", {"n_buyers": 3}),
                                     ("common_value_avg", {"n_buyers": 2}),
                                     ("private_values", {"n_buyers": 3})])
def test_positive_dependence(name, kw):
    assert check_positive_dependence(make_model(name, **kw)).ok


def test_example1_conditional_mean(ex1):
    y, z = np.array([0.6, 0.2]), np.array([0.3, 0.1])
    np.testing.assert_allclose(cond_expect_pair(ex1, lambda x: x, y, z), (2 * y + z) / 3)


def test_example2_conditional_mean(ex2):
    assert cond_expect_pair(ex2, lambda x: x, 0.4, 0.4) == pytest.approx(0.4)


def test_common_value_pair_law_matches_simulation(cv3):
    # given Y1 = 0.8 and Z1 = 0.5 the third signal is uniform on [0, 0.5]
    got = cond_expect_pair(cv3, lambda x: x ** 2, 0.8, 0.5)
    rng = np.random.default_rng(1)
    v = (0.8 + 0.5 + 0.5 * rng.random(1_000_000)) / 3
    assert got == pytest.approx(np.mean(v ** 2), abs=2e-4)
    assert cond_expect_full(cv3, lambda x: x, 0.8, [0.5, 0.2]) == pytest.approx(0.5)


def test_signal_sampling_shape_and_range(cv3):
    y = cv3.sample_signals(RandomStream(0), 1000)
    assert y.shape == (1000, 3)
    assert y.min() >= 0 and y.max() <= 1


def test_value_sampling_mean(ex1):
    n = 200_000
    y = np.full((n, 2), [0.6, 0.3])
    x = ex1.sample_value(y[:, 0], y[:, 1:], RandomStream(2))
    assert x.mean() == pytest.approx(0.5, abs=0.005)


def test_custom_model_from_law_factory():
    m = CustomModel(2, pair_law_fn=lambda y1, z1: UniformLaw(np.zeros_like(y1), y1 + z1))
    assert cond_expect_pair(m, lambda x: x, 0.4, 0.2) == pytest.approx(0.3)


def test_unknown_model():
    with pytest.raises(KeyError):
        make_model("nope")
