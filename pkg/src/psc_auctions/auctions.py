"""Two-stage sale simulation and revenue accounting.

The seller first runs a second price or English auction, then collects the
sharing payment on the winner's preliminary profit. Stage 1 revenue is the
auction payment and stage 2 revenue is the sharing payment.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .contracts import ONE_TIME, PLSC, POSC
from .equilibrium import (BidFunction, bid_eng, bid_sp, english_strategy,
                          infer_signal_from_drop)
from .exceptions import NonTermination
from .numerics import RandomStream, gauss_legendre, integrate_1d
from .validation import check_alpha, check_positive_int, check_signal_profiles

BLOCK_SIZE = 1 << 16
MC = "mc"
CLOSED = "closed_form"
SECOND_PRICE = "second_price"
ENGLISH = "english"
FORMATS = (SECOND_PRICE, ENGLISH)


@dataclass
class AuctionOutcome:
    """Per-auction results; every field is an array with one entry per auction."""

    winner_index: np.ndarray
    auction_payment: np.ndarray
    realized_value: np.ndarray
    sharing_payment: np.ndarray
    buyer_total_profit: np.ndarray
    extras: dict = field(default_factory=dict)

    @classmethod
    def settle(cls, winner, payment, value, contract, **extras):
        share = contract.payment(value - payment)
        return cls(winner, payment, value, share, value - payment - share, extras)

    def __len__(self):
        return len(self.winner_index)


@dataclass
class RevenueBreakdown:
    stage1: float
    stage2: float
    total: float
    stderr_total: float
    n_samples: int
    estimator: str = MC

    @classmethod
    def from_samples(cls, stage1, stage2):
        stage1 = np.asarray(stage1, dtype=float)
        stage2 = np.asarray(stage2, dtype=float)
        totals = stage1 + stage2
        n = totals.size
        se = float(totals.std(ddof=1) / np.sqrt(n)) if n > 1 else float("nan")
        return cls(float(stage1.mean()), float(stage2.mean()), float(totals.mean()), se, n, MC)

    @classmethod
    def exact(cls, stage1, stage2):
        return cls(float(stage1), float(stage2), float(stage1 + stage2), 0.0, 0, CLOSED)


def _sorted_desc(y):
    return -np.sort(-y, axis=1)


def _default_stream(stream):
    return RandomStream(0, 0) if stream is None else stream


# single auctions

def run_second_price(model, strategy, contract, stream=None, signals=None, count=1):
    """Simulate second price auctions followed by the sharing stage.

    Signals are drawn from ``stream`` unless ``signals`` forces a profile (or
    a batch of them). The highest bid wins (lowest index on ties) and pays the
    second-highest bid.
    """
    stream = _default_stream(stream)
    if signals is None:
        y = model.sample_signals(stream, check_positive_int(count, "count"))
    else:
        y = check_signal_profiles(signals, model)
    bids = np.asarray(strategy(y), dtype=float).reshape(y.shape)
    winner = np.argmax(bids, axis=1)
    payment = np.sort(bids, axis=1)[:, -2]
    rows = np.arange(y.shape[0])
    value = model.sample_value(y[rows, winner], _others(y, winner), stream)
    return AuctionOutcome.settle(winner, payment, value, contract, signals=y, bids=bids)


def _others(y, winner):
    mask = np.ones_like(y, dtype=bool)
    mask[np.arange(y.shape[0]), winner] = False
    return y[mask].reshape(y.shape[0], y.shape[1] - 1)


def english_payment_direct(model, u, contract, signals, stream=None):
    """English auction outcome from the closed-form price at which the last rival quits.

    The winner is the highest signal. The payment is the indifference bid of
    a buyer whose own signal equals the highest losing signal and who
    conditions on every losing signal.
    """
    y = check_signal_profiles(signals, model)
    winner = np.argmax(y, axis=1)
    z = _sorted_desc(_others(y, winner))
    payment = bid_eng(model, u, contract, z[:, 0], z)
    value = model.sample_value(y[np.arange(y.shape[0]), winner], z, _default_stream(stream))
    return AuctionOutcome.settle(winner, np.atleast_1d(payment), value, contract, signals=y)


def run_english_clock(model, u, contract, signals, price_step=1e-4, stream=None):
    """Discretised ascending clock with public drop-outs.

    The price moves in ticks of ``price_step``. A buyer quits at the first tick
    strictly above the drop-out price implied by the current inference state.
    Since a drop is only known to have happened inside the last tick, the
    midpoint of that tick is announced and used both to infer the quitter's
    signal and as the winner's payment. Simultaneous quits are processed one
    at a time at the same tick, highest index first.

    Raises ``NonTermination`` if a drop-out price lies beyond the value range.
    """
    if price_step <= 0:
        raise ValueError("price_step must be positive")
    y = check_signal_profiles(signals, model)
    batch, n = y.shape
    lo, hi = model.value_interval
    ceiling = hi + (hi - lo)
    active = np.tile(np.arange(n), (batch, 1))
    inferred = np.empty((batch, 0))
    announced = np.empty((batch, 0))
    tick = np.full(batch, np.iinfo(np.int64).min // 2, dtype=np.int64)
    rows = np.arange(batch)
    for dropped in range(n - 1):
        k = n - dropped
        ys = y[rows[:, None], active]
        known = np.repeat(inferred[:, ::-1], k, axis=0)
        thresholds = np.asarray(english_strategy(model, u, contract, k, ys.reshape(-1), known),
                                dtype=float).reshape(batch, k)
        if np.any(thresholds > ceiling):
            raise NonTermination(f"clock price passed {ceiling:g} with {k} buyers still active")
        # lowest threshold quits first; ties go to the highest index
        order = np.lexsort((-active, thresholds), axis=1)
        j = order[:, 0]
        quit_tick = np.floor(thresholds[rows, j] / price_step).astype(np.int64) + 1
        tick = np.maximum(tick, quit_tick)
        price = (tick - 0.5) * price_step
        q = infer_signal_from_drop(model, u, contract, k, price, inferred[:, ::-1], clip=True)
        inferred = np.concatenate([inferred, q[:, None]], axis=1)
        announced = np.concatenate([announced, price[:, None]], axis=1)
        keep = np.ones_like(active, dtype=bool)
        keep[rows, j] = False
        active = active[keep].reshape(batch, k - 1)
    winner = active[:, 0]
    payment = announced[:, -1]
    value = model.sample_value(y[rows, winner], _others(y, winner), _default_stream(stream))
    return AuctionOutcome.settle(winner, payment, value, contract, signals=y,
                                 drop_prices=announced, inferred_signals=inferred)


# Monte Carlo revenue with common random numbers

@dataclass
class Cell:
    """One mechanism to evaluate on shared draws.

    ``payment(ys)`` maps signal profiles sorted in descending order (winner
    first) to auction payments; ``stage2(x, pay)`` gives the seller's second
    stage take from the realised value.
    """

    label: str
    payment: object
    stage2: object


def contract_cell(model, u, contract, fmt=SECOND_PRICE, strategy=None, label=None):
    if fmt == SECOND_PRICE:
        if strategy is None:
            strategy = BidFunction(model, u, contract).fit()

        def payment(ys):
            return strategy.predict(ys[:, 1])
    elif fmt == ENGLISH:
        def payment(ys):
            return np.atleast_1d(bid_eng(model, u, contract, ys[:, 1], ys[:, 1:]))
    else:
        raise ValueError(f"unknown auction format {fmt!r}; choose from {FORMATS}")
    return Cell(label or str(contract), payment, lambda x, pay: contract.payment(x - pay))


def simulate_cells(model, cells, n, stream, block_size=BLOCK_SIZE):
    """Per-sample (stage1, stage2) arrays for every cell on identical draws.

    Block ``i`` uses ``stream.child(i)``; signals and the winner's value are
    drawn once per block and shared by all cells. The winner is the highest
    signal, which is also the highest bid since every strategy is increasing.
    """
    n = check_positive_int(n, "n")
    out = {c.label: ([], []) for c in cells}
    done = 0
    block = 0
    while done < n:
        size = min(block_size, n - done)
        sub = stream.child(block)
        ys = _sorted_desc(model.sample_signals(sub, size))
        x = model.sample_value(ys[:, 0], ys[:, 1:], sub)
        for c in cells:
            pay = np.asarray(c.payment(ys), dtype=float)
            out[c.label][0].append(pay)
            out[c.label][1].append(np.asarray(c.stage2(x, pay), dtype=float))
        done += size
        block += 1
    return {k: (np.concatenate(a), np.concatenate(b)) for k, (a, b) in out.items()}


def estimate_revenue(model, u, contract, fmt=SECOND_PRICE, n=100_000, stream=None,
                     strategy=None):
    """Monte Carlo revenue by stage; English payments use the direct formula."""
    cell = contract_cell(model, u, contract, fmt, strategy)
    s1, s2 = simulate_cells(model, [cell], n, _default_stream(stream))[cell.label]
    return RevenueBreakdown.from_samples(s1, s2)


@dataclass
class PairedDifference:
    first: str
    second: str
    mean: float
    stderr: float

    @property
    def t_stat(self):
        if self.stderr == 0:
            return np.inf * np.sign(self.mean) if self.mean else 0.0
        return self.mean / self.stderr


@dataclass
class ComparisonReport:
    """Unpaired breakdowns per cell plus paired differences of total revenue."""

    breakdowns: dict
    totals: dict = field(repr=False, default_factory=dict)

    def difference(self, first, second):
        """``second - first`` averaged over the shared draws."""
        d = self.totals[second] - self.totals[first]
        return PairedDifference(first, second, float(d.mean()),
                                float(d.std(ddof=1) / np.sqrt(d.size)))

    def differences(self):
        labels = list(self.breakdowns)
        return [self.difference(a, b) for i, a in enumerate(labels) for b in labels[i + 1:]]

    def ranking(self):
        return sorted(self.breakdowns, key=lambda k: -self.breakdowns[k].total)


def compare_cells(model, cells, n, stream):
    labels = [c.label for c in cells]
    if len(set(labels)) != len(labels):
        raise ValueError("cell labels must be distinct")
    samples = simulate_cells(model, cells, n, stream)
    breakdowns = {k: RevenueBreakdown.from_samples(*v) for k, v in samples.items()}
    return ComparisonReport(breakdowns, {k: v[0] + v[1] for k, v in samples.items()})


def compare_contracts_paired(model, u, contracts, fmt=SECOND_PRICE, n=100_000, seed=0,
                             labels=None):
    """Evaluate several contracts on common random numbers."""
    if len(contracts) < 2:
        raise ValueError("need at least two contracts to compare")
    labels = labels or [str(c) for c in contracts]
    cells = [contract_cell(model, u, c, fmt, label=lab) for c, lab in zip(contracts, labels)]
    return compare_cells(model, cells, n, RandomStream(seed, 1))


def compare_formats_paired(model, u, contract, n=100_000, seed=0):
    """Second price against English for one contract, on common random numbers."""
    cells = [contract_cell(model, u, contract, SECOND_PRICE, label=SECOND_PRICE),
             contract_cell(model, u, contract, ENGLISH, label=ENGLISH)]
    return compare_cells(model, cells, n, RandomStream(seed, 2))


# deterministic evaluators

def revenue_closed_form_example1(kind, alpha=0.0):
    """Stage revenues of the two-buyer Bernoulli example with a risk neutral buyer."""
    alpha = check_alpha(alpha)
    if kind == ONE_TIME or alpha == 0.0:
        return RevenueBreakdown.exact(1.0 / 3.0, 0.0)
    if kind == PLSC:
        return RevenueBreakdown.exact(1.0 / 3.0, 2.0 * alpha / 9.0)
    if kind != POSC:
        raise ValueError(f"no closed form for contract kind {kind!r}")
    a = alpha
    i1 = integrate_1d(lambda t: t * (1 - t) / (1 - a * t), 0.0, 1.0, 32, adaptive=True, tol=1e-14)
    i2 = integrate_1d(lambda t: t * (1 - t) * (1 + 2 * t) / (1 - a * t), 0.0, 1.0, 32,
                      adaptive=True, tol=1e-14)
    return RevenueBreakdown.exact(2 * (1 - a) * i1, 5 * a / 9 - (2 * a * (1 - a) / 3) * i2)


def two_buyer_quadrature(model, payment, stage2, kinks=(), nodes=64):
    """Expected stage revenues of a two-buyer auction by tensor Gauss-Legendre rules.

    ``payment(m)`` is the payment when the losing signal is ``m``;
    ``stage2(x, pay)`` the second stage take. The winner's value is integrated
    against the model's conditional law with the support split at ``pay + kinks``.
    """
    if model.n_buyers != 2:
        raise ValueError("two_buyer_quadrature needs a two-buyer model")
    lo, hi = model.signal_interval
    x, w = gauss_legendre(nodes)
    m = lo + 0.5 * (hi - lo) * (x + 1.0)
    wm = 0.5 * (hi - lo) * w
    half = 0.5 * (hi - m)
    big = m[:, None] + half[:, None] * (x[None, :] + 1.0)
    weights = wm[:, None] * half[:, None] * w[None, :] * 2.0 / (hi - lo) ** 2
    pay_m = np.asarray(payment(m), dtype=float)
    pay = np.broadcast_to(pay_m[:, None], big.shape).reshape(-1)
    law = model.pair_law(big.reshape(-1), np.broadcast_to(m[:, None], big.shape).reshape(-1))
    kinks = np.asarray(kinks, dtype=float).reshape(-1)
    cuts = pay[:, None] + kinks[None, :] if kinks.size else None
    take = law.expect(lambda v: stage2(v, pay[:, None]), kinks=cuts).reshape(big.shape)
    stage1 = float(np.sum(weights * pay_m[:, None]))
    return RevenueBreakdown.exact(stage1, float(np.sum(weights * take)))


def revenue_quadrature(model, u, contract, nodes=64):
    """Deterministic second price revenue for two-buyer models."""

    def payment(m):
        return bid_sp(model, u, contract, m, m)

    return two_buyer_quadrature(model, payment, lambda x, pay: contract.payment(x - pay),
                                contract.kinks(), nodes)
