"""Symmetric equilibrium bids.

Every bid in this module is an *indifference bid*: the auction-stage payment
``b`` at which the winner's conditional expected utility of total profit is
zero. Total profit is strictly decreasing in ``b`` for every rule handled
here, so each bid is the unique root of a monotone equation and is found by
bisection. Solvers are vectorised: pass arrays of signals to solve many
equations at once.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .contracts import GENERAL, ONE_TIME, PLSC, POSC, SharingContract, check_admissible, default_profit_grid
from .exceptions import InadmissibleContract, NumericError
from .numerics import DEFAULT_ABS_TOL, monotone_interpolate, solve_monotone_root
from .validation import check_alpha, check_order_stats, check_positive_int

DIAGONAL_GRID_NODES = 512


def _scalar_or_array(out, *inputs):
    if all(np.ndim(a) == 0 for a in inputs):
        return float(np.asarray(out).reshape(-1)[0])
    return out


def indifference_bid(law, u, profit, kinks=(), abs_tol=DEFAULT_ABS_TOL):
    """Root ``b`` of ``E[u(profit(X, b))] = 0`` for each member of a batched law.

    ``profit(x, b)`` must be increasing in ``x`` and strictly decreasing in
    ``b``; ``kinks`` are preliminary-profit levels ``w = x - b`` where it is
    not smooth. The root-finder starts from the conditional mean of ``X``.
    """
    kinks = np.asarray(kinks, dtype=float).reshape(-1)

    def excess_utility(b):
        bb = b[:, None]
        cuts = bb + kinks[None, :] if kinks.size else None
        return law.expect(lambda x: u(profit(x, bb)), kinks=cuts)

    return solve_monotone_root(excess_utility, law.mean(), abs_tol)


def contract_profit(contract):
    """Winner's total profit ``w - phi(w)`` as a function of ``(x, b)``."""
    return lambda x, b: (x - b) - contract.payment(x - b)


def _bid_on_law(law, u, contract, abs_tol):
    return indifference_bid(law, u, contract_profit(contract), contract.kinks(), abs_tol)


def bid_sp(model, u, contract, y1, z1, abs_tol=DEFAULT_ABS_TOL):
    """Second price indifference bid for any supported sharing rule."""
    law = model.pair_law(y1, z1)
    return _scalar_or_array(_bid_on_law(law, u, contract, abs_tol), y1, z1)


def bid_posc_sp(model, u, alpha, y1, z1, abs_tol=DEFAULT_ABS_TOL):
    """Payment at which the POSC winner with signals ``(y1, z1)`` is indifferent.

    May be negative for large ``alpha``; no floor is applied.
    """
    return bid_sp(model, u, SharingContract.posc(alpha), y1, z1, abs_tol)


def bid_plsc_sp(model, u, alpha, y1, z1, abs_tol=DEFAULT_ABS_TOL):
    return bid_sp(model, u, SharingContract.plsc(alpha), y1, z1, abs_tol)


def _profit_grid_for(model):
    lo, hi = model.value_interval
    return default_profit_grid((lo - (hi - lo), hi + (hi - lo)))


def require_admissible(contract, model):
    report = check_admissible(contract, _profit_grid_for(model))
    if not report.ok:
        raise InadmissibleContract(
            f"{contract} fails admissibility properties {sorted(report.violations)}")
    return report


def bid_general_sp(model, u, contract, y1, z1, abs_tol=DEFAULT_ABS_TOL):
    """Indifference bid under an admissible sharing rule ``phi``."""
    require_admissible(contract, model)
    return bid_sp(model, u, contract, y1, z1, abs_tol)


def bid_eng(model, u, contract, y1, z, abs_tol=DEFAULT_ABS_TOL):
    """Indifference bid given own signal ``y1`` and *all* rival signals ``z``.

    ``z`` is one descending vector of ``N - 1`` signals or a 2-d batch of them.
    """
    if contract.kind not in (ONE_TIME, POSC, PLSC):
        raise ValueError("the English auction supports one_time, posc and plsc contracts")
    zz = check_order_stats(z, model)
    y = np.broadcast_to(np.atleast_1d(np.asarray(y1, dtype=float)), (zz.shape[0],))
    law = model.full_law(y, zz)
    out = _bid_on_law(law, u, contract, abs_tol)
    if np.ndim(y1) == 0 and np.ndim(z) <= 1:
        return float(out[0])
    return out


def english_strategy(model, u, contract, k_active, y, q_so_far=(), abs_tol=DEFAULT_ABS_TOL):
    """Drop-out price of a buyer with signal ``y`` while ``k_active`` buyers remain.

    ``q_so_far`` holds the signals inferred from earlier drops, most recent
    (largest) first; it has ``N - k_active`` entries, or that many columns for
    a batch of ``y`` values.
    """
    n = model.n_buyers
    if not 2 <= k_active <= n:
        raise ValueError(f"k_active must lie in [2, {n}]")
    y = np.atleast_1d(np.asarray(y, dtype=float))
    q = np.asarray(q_so_far, dtype=float)
    q = q.reshape(1, -1) if q.ndim <= 1 else q
    if q.shape[1] != n - k_active:
        raise ValueError(f"expected {n - k_active} inferred signals, got {q.shape[1]}")
    batch = max(y.shape[0], q.shape[0])
    y = np.broadcast_to(y, (batch,))
    q = np.broadcast_to(q, (batch, q.shape[1]))
    z = np.concatenate([np.repeat(y[:, None], k_active - 1, axis=1), q], axis=1)
    law = model.full_law(y, z)
    out = _bid_on_law(law, u, contract, abs_tol)
    if batch == 1 and np.ndim(q_so_far) <= 1:
        return float(out[0])
    return out


def infer_signal_from_drop(model, u, contract, k_active, price, known_desc=None,
                           abs_tol=1e-12, clip=False):
    """Signal of a buyer who dropped at ``price`` while ``k_active`` buyers were in.

    ``known_desc`` holds the signals already inferred (largest first), one row
    per price. With ``clip=True`` prices outside the strategy's range map to
    the ends of the signal interval instead of raising ``BracketFailure``.
    """
    price = np.atleast_1d(np.asarray(price, dtype=float))
    batch = price.shape[0]
    known = np.empty((batch, 0)) if known_desc is None else np.asarray(known_desc, dtype=float)
    known = known.reshape(batch, -1)
    lo, hi = model.signal_interval

    def strategy(b, rows):
        return english_strategy(model, u, contract, k_active, b, known[rows], abs_tol=abs_tol * 0.1)

    out = np.empty(batch)
    rows = np.arange(batch)
    if clip:
        at_lo = strategy(np.full(batch, lo), rows)
        at_hi = strategy(np.full(batch, hi), rows)
        below = price <= at_lo
        above = price >= at_hi
        out[below] = lo
        out[above & ~below] = hi
        rows = np.nonzero(~(below | above))[0]
        if rows.size == 0:
            return out

    def gap(b):
        return price[rows] - strategy(b, rows)

    out[rows] = solve_monotone_root(gap, np.full(rows.size, 0.5 * (lo + hi)), abs_tol,
                                    lo=np.full(rows.size, lo), hi=np.full(rows.size, hi))
    return out


def invert_drop_prices(model, u, contract, observed_prices, abs_tol=1e-12):
    """Recover the signals of the buyers who dropped at ``observed_prices``.

    Prices are in drop order (nondecreasing); a 2-d array is a batch of price
    paths. Each inferred signal solves ``strategy(b) = p_k`` where the strategy
    conditions on ``N - k + 1`` copies of ``b`` plus the signals already
    recovered. Raises ``BracketFailure`` if a price cannot be produced by any
    signal in the model's signal interval.
    """
    prices = np.asarray(observed_prices, dtype=float)
    single = prices.ndim <= 1
    prices = np.atleast_2d(prices)
    if np.any(np.diff(prices, axis=1) < -1e-12):
        raise ValueError("drop prices must be nondecreasing")
    n = model.n_buyers
    if prices.shape[1] > n - 1:
        raise ValueError(f"at most {n - 1} drop prices in an auction with {n} buyers")
    q = np.empty((prices.shape[0], 0))
    for k in range(prices.shape[1]):
        qk = infer_signal_from_drop(model, u, contract, n - k, prices[:, k], q[:, ::-1], abs_tol)
        q = np.concatenate([q, qk[:, None]], axis=1)
    return q[0] if single else q


class BidFunction(BaseEstimator):
    """Symmetric second price equilibrium strategy tabulated on the diagonal.

    ``fit`` solves ``beta(y) = bid(y, y)`` on a uniform signal grid; ``predict``
    interpolates it. Supplying ``cost`` switches to the hidden-effort
    variants: PLSC bids include the effort gain, POSC bids use the ex-post
    effort policy (quadratic costs, linear utility).

    Parameters
    ----------
    model : InfoModel
    utility : Utility
    contract : SharingContract
    cost : CostFunction or None
    grid_nodes : int
    abs_tol : float
    """

    def __init__(self, model=None, utility=None, contract=None, cost=None,
                 grid_nodes=DIAGONAL_GRID_NODES, abs_tol=DEFAULT_ABS_TOL):
        self.model = model
        self.utility = utility
        self.contract = contract
        self.cost = cost
        self.grid_nodes = grid_nodes
        self.abs_tol = abs_tol

    def bid(self, y1, z1):
        """Direct solve of the indifference equation off the diagonal."""
        if self.cost is None:
            if self.contract.kind == GENERAL:
                return bid_general_sp(self.model, self.utility, self.contract, y1, z1, self.abs_tol)
            return bid_sp(self.model, self.utility, self.contract, y1, z1, self.abs_tol)
        from . import principal_agent as pa

        alpha = check_alpha(self.contract.alpha)
        if self.contract.kind == PLSC:
            return pa.bid_plsc_pa(self.model, self.utility, self.cost, alpha, y1, z1, self.abs_tol)
        if self.contract.kind == POSC:
            return pa.bid_posc_pa(self.model, pa.quadratic_gamma(self.cost), alpha, y1, z1,
                                  self.abs_tol, utility=self.utility)
        raise ValueError("hidden-effort bids need a posc or plsc contract")

    def fit(self, X=None, y=None):
        check_positive_int(self.grid_nodes, "grid_nodes", minimum=2)
        lo, hi = self.model.signal_interval
        grid = np.linspace(lo, hi, int(self.grid_nodes))
        bids = np.asarray(self.bid(grid, grid), dtype=float)
        drops = np.diff(bids)
        if np.any(drops < -10 * self.abs_tol):
            raise NumericError("diagonal bids are not monotone; check the model's oracles")
        self.grid_ = grid
        self.bids_ = np.maximum.accumulate(bids)
        return self

    def predict(self, X):
        check_is_fitted(self, "bids_")
        return monotone_interpolate(self.grid_, self.bids_, X)

    def __call__(self, X):
        return self.predict(X)


def equilibrium_strategy_sp(model, u, contract, grid_nodes=DIAGONAL_GRID_NODES,
                            abs_tol=DEFAULT_ABS_TOL):
    """Fitted :class:`BidFunction` for the second price auction."""
    return BidFunction(model, u, contract, grid_nodes=grid_nodes, abs_tol=abs_tol).fit()
