"""Symmetric interdependent-values information structures.

An ``InfoModel`` describes the joint law of buyer 1's value ``X1`` and the
signal vector ``Y``. Everything downstream talks to it through two
conditional laws:

* ``pair_law(y1, z1)`` -- law of ``X1`` given ``Y1 = y1`` and highest rival
  signal ``Z1 = z1``;
* ``full_law(y1, z)`` -- law of ``X1`` given ``Y1 = y1`` and all rival
  signals ``Z = z`` (sorted descending).

Built-in models all have iid uniform signals. Conditioning on the
measure-zero event ``Z1 = z1`` pins one rival at ``z1`` and draws the rest
below it, which is how the nested Monte Carlo oracle is built.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import OracleUnavailable
from .laws import DiscreteLaw, IrwinHallLaw, UniformLaw
from .numerics import RandomStream
from .validation import check_order_stats, check_signal_profiles

CLOSED_FORM = "closed_form"
MONTE_CARLO = "monte_carlo"


class InfoModel:
    """Base class. Subclasses provide ``full_law`` and, when they can, ``_closed_pair_law``."""

    name = "custom"

    def __init__(self, n_buyers, signal_interval=(0.0, 1.0), value_interval=(0.0, 1.0),
                 oracle_kind=CLOSED_FORM, n_inner=4096, oracle_seed=0):
        if n_buyers < 2:
            raise ValueError("need at least two buyers")
        if oracle_kind not in (CLOSED_FORM, MONTE_CARLO):
            raise ValueError(f"unknown oracle kind {oracle_kind!r}")
        self.n_buyers = int(n_buyers)
        self.signal_interval = (float(signal_interval[0]), float(signal_interval[1]))
        self.value_interval = (float(value_interval[0]), float(value_interval[1]))
        if not self.signal_interval[0] < self.signal_interval[1]:
            raise ValueError("signal interval must have lo < hi")
        self.oracle_kind = oracle_kind
        self.n_inner = int(n_inner)
        self.oracle_seed = int(oracle_seed)

    def __repr__(self):
        return f"{type(self).__name__}(n_buyers={self.n_buyers}, oracle_kind={self.oracle_kind!r})"

    def params(self):
        return {"n_buyers": self.n_buyers}

    # sampling
    def sample_signals(self, stream, count):
        lo, hi = self.signal_interval
        return stream.uniform(lo, hi, size=(int(count), self.n_buyers))

    def _sample_below(self, z1, size, rng):
        # rival signals conditioned to lie below z1 (iid uniform signals)
        lo = self.signal_interval[0]
        return lo + (z1[:, None] - lo) * rng.random((z1.shape[0], size))

    def sample_value(self, y_own, y_others, stream):
        """Draw the value of a buyer with signal ``y_own`` facing ``y_others``."""
        y_own = np.atleast_1d(np.asarray(y_own, dtype=float))
        y_others = np.atleast_2d(np.asarray(y_others, dtype=float))
        z = -np.sort(-y_others, axis=1)
        return self.full_law(y_own, z).sample(stream.rng)

    # conditional laws
    def full_law(self, y1, z):
        raise OracleUnavailable(f"{type(self).__name__} provides no full conditional law")

    def _closed_pair_law(self, y1, z1):
        return None

    def pair_law(self, y1, z1):
        y1 = np.atleast_1d(np.asarray(y1, dtype=float))
        z1 = np.atleast_1d(np.asarray(z1, dtype=float))
        y1, z1 = np.broadcast_arrays(y1, z1)
        if self.oracle_kind == CLOSED_FORM:
            law = self._closed_pair_law(y1, z1)
            if law is not None:
                return law
        return self._nested_pair_law(y1, z1)

    def _nested_pair_law(self, y1, z1):
        """Empirical law of ``X1`` from nested sampling; fixed seed keeps it smooth in ``b``."""
        rng = RandomStream(self.oracle_seed, 0x0AC1E).rng
        batch, m = y1.shape[0], self.n_inner
        rest = self.n_buyers - 2
        y_rep = np.repeat(y1, m)
        z1_rep = np.repeat(z1, m)
        if rest > 0:
            below = self._sample_below(z1_rep, rest, rng)
            z = np.concatenate([z1_rep[:, None], -np.sort(-below, axis=1)], axis=1)
        else:
            z = z1_rep[:, None]
        try:
            draws = self.full_law(y_rep, z).sample(rng)
        except OracleUnavailable as err:
            raise OracleUnavailable(
                f"{type(self).__name__} has neither a closed-form pair oracle nor a conditional sampler"
            ) from err
        return DiscreteLaw.empirical(draws.reshape(batch, m))


class Example1(InfoModel):
    """Two buyers, uniform signals, Bernoulli value with success probability (2 y1 + y2) / 3."""

    name = "example1"

    def __init__(self, **kwargs):
        kwargs.setdefault("value_interval", (0.0, 1.0))
        super().__init__(2, **kwargs)

    def full_law(self, y1, z):
        y1 = np.atleast_1d(np.asarray(y1, dtype=float))
        z = np.atleast_2d(np.asarray(z, dtype=float))
        return DiscreteLaw.bernoulli((2.0 * y1 + z[:, 0]) / 3.0)

    def _closed_pair_law(self, y1, z1):
        return DiscreteLaw.bernoulli((2.0 * y1 + z1) / 3.0)

    def params(self):
        return {}


class Example2PA(InfoModel):
    """Two buyers, uniform signals, value uniform on [0, y1 + y2]."""

    name = "example2_pa"

    def __init__(self, **kwargs):
        kwargs.setdefault("value_interval", (0.0, 2.0))
        super().__init__(2, **kwargs)

    def full_law(self, y1, z):
        y1 = np.atleast_1d(np.asarray(y1, dtype=float))
        z = np.atleast_2d(np.asarray(z, dtype=float))
        return UniformLaw(np.zeros_like(y1), y1 + z[:, 0])

    def _closed_pair_law(self, y1, z1):
        return UniformLaw(np.zeros_like(y1), y1 + z1)

    def params(self):
        return {}


class CommonValueAverage(InfoModel):
    """Pure common value equal to the average of all N uniform signals."""

    name = "common_value_avg"

    def __init__(self, n_buyers=3, **kwargs):
        kwargs.setdefault("value_interval", (0.0, 1.0))
        super().__init__(n_buyers, **kwargs)

    def full_law(self, y1, z):
        y1 = np.atleast_1d(np.asarray(y1, dtype=float))
        z = np.atleast_2d(np.asarray(z, dtype=float))
        return DiscreteLaw.point((y1 + z.sum(axis=1)) / self.n_buyers)

    def _closed_pair_law(self, y1, z1):
        n = self.n_buyers
        if n == 2:
            return DiscreteLaw.point((y1 + z1) / 2.0)
        lo = self.signal_interval[0]
        # remaining N-2 rivals are iid uniform on [lo, z1]
        offset = (y1 + z1 + (n - 2) * lo) / n
        return IrwinHallLaw(offset, (z1 - lo) / n, n - 2)


class PrivateValues(InfoModel):
    """Independent private values: X_n | y_n uniform on [0, 2 y_n]."""

    name = "private_values"

    def __init__(self, n_buyers=2, **kwargs):
        kwargs.setdefault("value_interval", (0.0, 2.0))
        super().__init__(n_buyers, **kwargs)

    def full_law(self, y1, z):
        y1 = np.atleast_1d(np.asarray(y1, dtype=float))
        return UniformLaw(np.zeros_like(y1), 2.0 * y1)

    def _closed_pair_law(self, y1, z1):
        return UniformLaw(np.zeros_like(y1), 2.0 * y1)


class CustomModel(InfoModel):
    """User-supplied model built from law factories.

    ``pair_law_fn(y1, z1)`` and ``full_law_fn(y1, z)`` return law objects
    (see :mod:`psc_auctions.laws`). Either may be omitted; with neither the
    oracles raise ``OracleUnavailable``.
    """

    def __init__(self, n_buyers, pair_law_fn=None, full_law_fn=None, name="custom", **kwargs):
        super().__init__(n_buyers, **kwargs)
        self._pair_law_fn = pair_law_fn
        self._full_law_fn = full_law_fn
        self.name = name

    def full_law(self, y1, z):
        if self._full_law_fn is None:
            raise OracleUnavailable(f"model {self.name!r} has no conditional sampler")
        return self._full_law_fn(np.atleast_1d(y1), np.atleast_2d(z))

    def _closed_pair_law(self, y1, z1):
        if self._pair_law_fn is None:
            return None
        return self._pair_law_fn(y1, z1)


MODELS = {
    "example1": Example1,
    "example2_pa": Example2PA,
    "common_value_avg": CommonValueAverage,
    "private_values": PrivateValues,
}


def make_model(name, **params):
    """Build a registered model by name, e.g. ``make_model("common_value_avg", n_buyers=3)``."""
    try:
        cls = MODELS[name]
    except KeyError:
        raise KeyError(f"unknown model {name!r}; choose from {sorted(MODELS)}") from None
    if "N" in params:
        params["n_buyers"] = params.pop("N")
    return cls(**params)


def example1(**kw):
    return Example1(**kw)


def example2_pa(**kw):
    return Example2PA(**kw)


def common_value_avg(n_buyers=3, **kw):
    return CommonValueAverage(n_buyers, **kw)


def private_values(n_buyers=2, **kw):
    return PrivateValues(n_buyers, **kw)


# operations

def sample_signals(model, stream, count):
    return model.sample_signals(stream, count)


def sample_value_given_signals(model, y, stream):
    """One draw of ``X1`` given the full signal profile ``y`` (buyer 1 first)."""
    y = check_signal_profiles(y, model)
    return model.sample_value(y[:, 0], y[:, 1:], stream)


def cond_expect_pair(model, g, y1, z1):
    """``E[g(X1) | Y1 = y1, Z1 = z1]``; ``g`` must accept numpy arrays."""
    scalar = np.ndim(y1) == 0 and np.ndim(z1) == 0
    out = model.pair_law(y1, z1).expect(g)
    return float(out[0]) if scalar else out


def cond_expect_full(model, g, y1, z):
    """``E[g(X1) | Y1 = y1, Z = z]`` with ``z`` sorted descending."""
    scalar = np.ndim(y1) == 0 and np.ndim(z) <= 1
    z = check_order_stats(z, model)
    y1 = np.broadcast_to(np.atleast_1d(np.asarray(y1, dtype=float)), (z.shape[0],))
    out = model.full_law(y1, z).expect(g)
    return float(out[0]) if scalar else out


@dataclass
class DependenceReport:
    test_functions: list
    grid: np.ndarray
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    def summary(self):
        status = "ok" if self.ok else f"{len(self.violations)} violation(s)"
        return (f"positive dependence on {len(self.grid)}-point grid with "
                f"{', '.join(self.test_functions)}: {status}")


def check_positive_dependence(model, grid_resolution=16, thresholds=(0.25, 0.5, 0.75), tol=None):
    """Grid check that ``E[h(X1) | Y1=y1, Z1=z1]`` rises with ``y1`` and ``z1``.

    Strictly increasing ``h`` (the identity) must give a strictly increasing
    expectation in ``y1``; the clipped test functions ``min(x, c)`` are only
    weakly increasing, so for them nondecreasing is required. Every ``h`` must
    be nondecreasing in ``z1``. ``c`` runs over quantiles of the value
    interval given by ``thresholds``.
    """
    lo, hi = model.signal_interval
    grid = lo + (hi - lo) * (np.arange(grid_resolution) + 0.5) / grid_resolution
    if tol is None:
        tol = 1e-12 if model.oracle_kind == CLOSED_FORM else 4.0 / np.sqrt(model.n_inner)
    x_lo, x_hi = model.value_interval
    tests = [("identity", lambda x: x, True)]
    for frac in thresholds:
        c = x_lo + frac * (x_hi - x_lo)
        tests.append((f"min(x,{c:g})", lambda x, c=c: np.minimum(x, c), False))

    yy, zz = np.meshgrid(grid, grid, indexing="ij")
    law = model.pair_law(yy.ravel(), zz.ravel())
    report = DependenceReport([name for name, _, _ in tests], grid)
    for name, h, strict in tests:
        vals = law.expect(h).reshape(yy.shape)
        dy = np.diff(vals, axis=0)
        dz = np.diff(vals, axis=1)
        if strict and model.oracle_kind == CLOSED_FORM:
            bad_y = dy <= 0.0
        else:
            bad_y = dy < -tol
        for i, j in zip(*np.nonzero(bad_y)):
            report.violations.append((name, "y1", grid[i], grid[j], float(dy[i, j])))
        for i, j in zip(*np.nonzero(dz < -tol)):
            report.violations.append((name, "z1", grid[i], grid[j], float(dz[i, j])))
    return report
