"""Hidden effort by the winning buyer.

After winning, the buyer can raise the resource's value from ``x`` to
``x + e`` at private cost ``c(e)``. Under a PLSC the chosen effort does not
depend on ``x`` and adds a fixed gain to the winner's profit. Under a POSC
the effort is chosen after observing ``x`` and depends on the preliminary
profit; only quadratic costs and risk neutral buyers are handled there.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .auctions import Cell, RevenueBreakdown, compare_cells, simulate_cells, two_buyer_quadrature
from .equilibrium import BidFunction, indifference_bid
from .contracts import SharingContract
from .numerics import DEFAULT_ABS_TOL, RandomStream, solve_monotone_root
from .preferences import Utility
from .validation import check_alpha

QUADRATIC = "quadratic"
CUSTOM = "custom"


class CostFunction:
    """Increasing convex effort cost on an interval ``[e_lo, e_hi]``.

    Use :meth:`quadratic` for ``gamma * e**2`` or :meth:`custom` with a cost
    and its derivative. Marginal cost must cross 1 inside the interval.
    """

    def __init__(self, kind, cost, marginal, interval, gamma=None):
        self.kind = kind
        self._cost = cost
        self._marginal = marginal
        self.e_lo, self.e_hi = float(interval[0]), float(interval[1])
        self.gamma = gamma
        if not self.e_lo < self.e_hi:
            raise ValueError("effort interval needs e_lo < e_hi")

    @classmethod
    def quadratic(cls, gamma, e_hi=None, e_lo=0.0):
        gamma = float(gamma)
        if gamma <= 0:
            raise ValueError("gamma must be positive")
        e_hi = max(1.0, 1.0 / gamma) if e_hi is None else float(e_hi)
        if e_hi <= 1.0 / (2.0 * gamma):
            raise ValueError(f"e_hi must exceed 1/(2 gamma) = {1 / (2 * gamma):g}")
        return cls(QUADRATIC, lambda e: gamma * np.square(e), lambda e: 2.0 * gamma * e,
                   (e_lo, e_hi), gamma)

    @classmethod
    def custom(cls, cost, marginal, interval, validate=True):
        out = cls(CUSTOM, cost, marginal, interval)
        if validate:
            problems = out.check()
            if problems:
                raise ValueError("cost function rejected: " + "; ".join(problems))
        return out

    def __repr__(self):
        if self.kind == QUADRATIC:
            return f"CostFunction.quadratic(gamma={self.gamma:g}, e_hi={self.e_hi:g})"
        return f"CostFunction.custom(interval=({self.e_lo:g}, {self.e_hi:g}))"

    def __call__(self, e):
        return self._cost(np.asarray(e, dtype=float))

    def marginal(self, e):
        return self._marginal(np.asarray(e, dtype=float))

    def check(self, points=201):
        """List of violated conditions on a grid over the effort interval."""
        e = np.linspace(self.e_lo, self.e_hi, points)
        c = self(e)
        dc = self.marginal(e)
        problems = []
        if np.any(c < -1e-12):
            problems.append("cost is negative somewhere")
        if np.any(np.diff(c) < -1e-12):
            problems.append("cost is not increasing")
        if np.any(np.diff(dc) < -1e-12):
            problems.append("cost is not convex")
        if not dc.min() < 1.0 < dc.max():
            problems.append("marginal cost does not cross 1 on the effort interval")
        return problems


def quadratic_gamma(cost):
    if isinstance(cost, CostFunction):
        if cost.kind != QUADRATIC:
            raise ValueError("ex-post effort under a POSC needs a quadratic cost")
        return cost.gamma
    return float(cost)


def optimal_effort_plsc(cost, alpha):
    """Effort maximising ``(1 - alpha) e - c(e)`` over the effort interval.

    The stationary point is compared with both endpoints; ties go to the
    smaller effort.
    """
    alpha = check_alpha(alpha)
    share = 1.0 - alpha
    lo, hi = cost.e_lo, cost.e_hi
    candidates = [lo, hi]
    m_lo, m_hi = float(cost.marginal(lo)), float(cost.marginal(hi))
    if m_lo < share < m_hi:
        if cost.kind == QUADRATIC:
            candidates.append(share / (2.0 * cost.gamma))
        else:
            candidates.append(solve_monotone_root(lambda e: share - cost.marginal(e),
                                                  0.5 * (lo + hi), 1e-13, lo=lo, hi=hi))
    candidates = np.sort(np.asarray(candidates))
    objective = share * candidates - cost(candidates)
    return float(candidates[np.argmax(objective)])


def effort_gain(cost, alpha):
    """Winner's net gain from optimal effort under a PLSC."""
    e = optimal_effort_plsc(cost, alpha)
    return float((1.0 - alpha) * e - cost(e))


def optimal_effort_posc_expost(gamma, alpha, w):
    """Optimal effort under a POSC once the preliminary profit ``w`` is known."""
    alpha = check_alpha(alpha)
    w = np.asarray(w, dtype=float)
    full = 1.0 / (2.0 * gamma)
    shared = (1.0 - alpha) / (2.0 * gamma)
    out = np.where(w <= -full, full, np.where(w >= -shared, shared, -w))
    return float(out) if out.ndim == 0 else out


def max_profit_posc_pa(gamma, alpha, w):
    """Winner's total profit under a POSC with the ex-post optimal effort."""
    e = optimal_effort_posc_expost(gamma, alpha, w)
    w = np.asarray(w, dtype=float)
    gross = w + e
    out = gross - alpha * np.maximum(gross, 0.0) - gamma * np.square(e)
    return float(out) if out.ndim == 0 else out


def _posc_pa_kinks(gamma, alpha):
    return np.array([-1.0 / (2.0 * gamma), -(1.0 - alpha) / (2.0 * gamma)])


def bid_plsc_pa(model, u, cost, alpha, y1, z1, abs_tol=DEFAULT_ABS_TOL):
    """Indifference bid when the PLSC winner also collects the effort gain."""
    alpha = check_alpha(alpha)
    gain = effort_gain(cost, alpha)
    law = model.pair_law(y1, z1)
    out = indifference_bid(law, u, lambda x, b: (1.0 - alpha) * (x - b) + gain, (), abs_tol)
    return float(out[0]) if np.ndim(y1) == 0 and np.ndim(z1) == 0 else out


def bid_posc_pa(model, gamma, alpha, y1, y2, abs_tol=DEFAULT_ABS_TOL, utility=None):
    """Indifference bid under a POSC with effort chosen after the value is seen."""
    if utility is not None and not utility.is_linear:
        raise ValueError("POSC bids with hidden effort support risk neutral buyers only")
    alpha = check_alpha(alpha)
    gamma = quadratic_gamma(gamma)
    law = model.pair_law(y1, y2)
    u = Utility.linear()
    out = indifference_bid(law, u, lambda x, b: max_profit_posc_pa(gamma, alpha, x - b),
                           _posc_pa_kinks(gamma, alpha), abs_tol)
    return float(out[0]) if np.ndim(y1) == 0 and np.ndim(y2) == 0 else out


# revenue

PLSC_PA = "plsc_pa"
POSC_PA = "posc_pa"


def pa_strategy(model, u, cost, kind, alpha, grid_nodes=512):
    contract = SharingContract.plsc(alpha) if kind == PLSC_PA else SharingContract.posc(alpha)
    return BidFunction(model, u, contract, cost=cost, grid_nodes=grid_nodes).fit()


def pa_cell(model, u, cost, kind, alpha, label=None, strategy=None):
    """Simulation cell for a hidden-effort mechanism."""
    alpha = check_alpha(alpha)
    strategy = strategy or pa_strategy(model, u, cost, kind, alpha)
    if kind == PLSC_PA:
        effort = optimal_effort_plsc(cost, alpha)

        def stage2(x, pay):
            return alpha * (x + effort - pay)
    elif kind == POSC_PA:
        gamma = quadratic_gamma(cost)

        def stage2(x, pay):
            e = optimal_effort_posc_expost(gamma, alpha, x - pay)
            return alpha * np.maximum(x + e - pay, 0.0)
    else:
        raise ValueError(f"unknown hidden-effort mechanism {kind!r}")
    return Cell(label or f"{kind}({alpha:g})", lambda ys: strategy.predict(ys[:, 1]), stage2)


def _stream(stream):
    return RandomStream(0, 3) if stream is None else stream


def revenue_plsc_pa(model, u, cost, alpha, n=100_000, stream=None):
    cell = pa_cell(model, u, cost, PLSC_PA, alpha)
    return RevenueBreakdown.from_samples(*simulate_cells(model, [cell], n, _stream(stream))[cell.label])


def revenue_plsc_pa_closed_form(gamma, alpha):
    """Stage revenues for the two-buyer uniform-value model with quadratic cost."""
    alpha = check_alpha(alpha)
    stage1 = 1.0 / 3.0 + (1.0 - alpha) / (4.0 * gamma)
    stage2 = alpha * (1.0 - alpha) / (4.0 * gamma) + alpha / 6.0
    return RevenueBreakdown.exact(stage1, stage2)


def revenue_posc_pa(model, gamma, alpha, n=100_000, stream=None):
    cost = CostFunction.quadratic(gamma) if not isinstance(gamma, CostFunction) else gamma
    cell = pa_cell(model, Utility.linear(), cost, POSC_PA, alpha)
    return RevenueBreakdown.from_samples(*simulate_cells(model, [cell], n, _stream(stream))[cell.label])


def revenue_posc_pa_quadrature(model, gamma, alpha, nodes=64):
    """Deterministic hidden-effort POSC revenue for two-buyer models."""
    alpha = check_alpha(alpha)
    gamma = quadratic_gamma(gamma)

    def stage2(x, pay):
        e = optimal_effort_posc_expost(gamma, alpha, x - pay)
        return alpha * np.maximum(x + e - pay, 0.0)

    return two_buyer_quadrature(model, lambda m: bid_posc_pa(model, gamma, alpha, m, m), stage2,
                                _posc_pa_kinks(gamma, alpha), nodes)


def revenue_plsc_pa_quadrature(model, u, cost, alpha, nodes=64):
    alpha = check_alpha(alpha)
    effort = optimal_effort_plsc(cost, alpha)
    return two_buyer_quadrature(model, lambda m: bid_plsc_pa(model, u, cost, alpha, m, m),
                                lambda x, pay: alpha * (x + effort - pay), (), nodes)


def compare_pa_paired(model, u, cost, specs, n=100_000, seed=0):
    """Hidden-effort mechanisms ``[(kind, alpha), ...]`` on common random numbers."""
    cells = [pa_cell(model, u, cost, kind, a) for kind, a in specs]
    return compare_cells(model, cells, n, RandomStream(seed, 4))


@dataclass
class FiniteDifference:
    value: float
    stderr: float
    h: float

    @property
    def t_stat(self):
        return np.inf if self.stderr == 0 else self.value / self.stderr

    def __float__(self):
        return float(self.value)


def derivative_at_zero(curve, h=1e-3):
    """Forward difference ``(R(h) - R(0)) / h``.

    ``curve(alpha)`` returns either a number (closed form, zero stderr) or an
    array of per-sample revenues drawn with common random numbers, in which
    case the stderr of the paired difference is reported too.
    """
    if h <= 0:
        raise ValueError("h must be positive")
    r0 = np.asarray(curve(0.0), dtype=float)
    rh = np.asarray(curve(h), dtype=float)
    if r0.ndim == 0:
        return FiniteDifference(float((rh - r0) / h), 0.0, h)
    d = (rh - r0) / h
    return FiniteDifference(float(d.mean()), float(d.std(ddof=1) / np.sqrt(d.size)), h)


def paired_pa_curve(model, u, cost, kind, n=100_000, seed=0):
    """Curve ``alpha -> per-sample total revenue`` sharing draws across ``alpha``."""

    def curve(alpha):
        cell = pa_cell(model, u, cost, kind, alpha)
        s1, s2 = simulate_cells(model, [cell], n, RandomStream(seed, 5))[cell.label]
        return s1 + s2

    return curve
