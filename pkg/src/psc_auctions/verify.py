"""Self-check suite behind ``psc-auctions verify``.

``fast`` runs every deterministic invariant plus small Monte Carlo
agreements; ``all`` adds the large-sample statistical rankings.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import auctions as A
from . import principal_agent as PA
from .contracts import SharingContract, check_admissible
from .equilibrium import (BidFunction, bid_eng, bid_general_sp, bid_plsc_sp, bid_posc_sp,
                          english_strategy, invert_drop_prices)
from .exceptions import PSCError
from .info_model import check_positive_dependence, make_model
from .numerics import RandomStream, gauss_legendre, solve_monotone_root
from .preferences import Utility, verify_utility
from .properties import (Check, english_bid_suite, example1_revenue_suite, midpoint_grid,
                         second_price_bid_suite)

FAST = "fast"
ALL = "all"

# admissible rule with slopes 0.1, 0.4, 0.2: bounded above by the 0.4 share fraction
BOUNDED_GENERAL = SharingContract.general([-1.0, 0.0, 0.5, 1.0], [-0.1, 0.0, 0.2, 0.3])


@dataclass
class VerifyReport:
    scope: str
    checks: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def lines(self):
        out = [c.line() for c in self.checks]
        n_fail = sum(not c.passed for c in self.checks)
        out.append(f"{len(self.checks) - n_fail}/{len(self.checks)} checks passed "
                   f"in {self.seconds:.1f}s (scope {self.scope})")
        return out


def _flag(name, ok, detail=0.0, points=1):
    return Check(name, bool(ok), points, 0 if ok else 1, float(detail))


def _within(name, value, target, tol):
    err = abs(value - target)
    return _flag(f"{name} (|{value:.6g} - {target:.6g}| <= {tol:g})", err <= tol, -err)


def _agree(name, mc, exact, k=3.0):
    z = abs(mc.total - exact) / mc.stderr_total
    return _flag(f"{name}: mc {mc.total:.5f} vs {exact:.5f}, z = {z:.2f} <= {k:g}", z <= k, -z)


def _positive_t(name, diff, k=3.0):
    return _flag(f"{name}: diff {diff.mean:.5f}, t = {diff.t_stat:.1f} > {k:g}", diff.t_stat > k,
                 min(diff.t_stat, 0.0))


def _not_below(name, diff, k=3.0):
    return _flag(f"{name}: diff {diff.mean:.5f} >= -{k:g} x {diff.stderr:.2g}",
                 diff.mean >= -k * diff.stderr, min(diff.t_stat, 0.0))


def numerics_checks():
    root = solve_monotone_root(lambda b: 0.3 - b ** 3, 0.0, 1e-13)
    x, w = gauss_legendre(8)
    poly = float(np.dot(w, x ** 14 + x ** 3))
    return [_within("bisection root of 0.3 - b^3", root, 0.3 ** (1 / 3), 1e-12),
            _within("8-point Gauss-Legendre exact for degree 15", poly, 2.0 / 15.0, 1e-14)]


def model_checks():
    out = []
    for name, kw in (("example1", {}), ("example2_pa", {}), ("common_value_avg", {"n_buyers": 3}),
                     ("private_values", {"n_buyers": 2})):
        rep = check_positive_dependence(make_model(name, **kw))
        out.append(_flag(f"positive dependence: {name}", rep.ok, -len(rep.violations)))
    for u in (Utility.linear(), Utility.cara(1.0, 1.0)):
        rep = verify_utility(u)
        out.append(_flag(f"utility normalised, increasing, concave: {u!r}", rep.ok))
    return out


def contract_checks(contracts):
    out = []
    for c in contracts:
        rep = check_admissible(c)
        detail = ", ".join(sorted(rep.violations)) or "ok"
        out.append(_flag(f"admissibility of {c} ({detail})", rep.ok))
    return out


def bid_checks():
    m1 = make_model("example1")
    cv = make_model("common_value_avg", n_buyers=3)
    lin = Utility.linear()
    out = []
    g = midpoint_grid(m1, 16)
    yy, zz = np.meshgrid(g, g, indexing="ij")
    y, z = yy.ravel(), zz.ravel()
    worst = 0.0
    for a in np.arange(8) / 8.0:
        p = 2 * y + z
        exact = (1 - a) * p / (3 - a * p)
        worst = max(worst, float(np.max(np.abs(bid_posc_sp(m1, lin, a, y, z) - exact))))
    out.append(_flag(f"example1 posc bid closed form on 16x16x8 grid (max err {worst:.2g})",
                     worst <= 1e-9, -worst))
    err = float(np.max(np.abs(bid_plsc_sp(m1, lin, 0.6, y, z) - (2 * y + z) / 3)))
    out.append(_flag(f"example1 plsc bid equals conditional mean (max err {err:.2g})", err <= 1e-9))
    for model in (m1, cv):
        for u in (lin, Utility.cara(1.0, 1.0)):
            tag = f"{model.name}, {u!r}"
            for c in second_price_bid_suite(model, u) + english_bid_suite(model, u):
                out.append(Check(f"{c.name} [{tag}]", c.passed, c.points, c.violations, c.worst))
    spec = 0.0
    for a in (0.1, 0.3, 0.7):
        spec = max(spec,
                   float(np.max(np.abs(bid_general_sp(m1, lin, SharingContract.posc(a), y, z)
                                       - bid_posc_sp(m1, lin, a, y, z)))),
                   float(np.max(np.abs(bid_general_sp(m1, lin, SharingContract.plsc(a), y, z)
                                       - bid_plsc_sp(m1, lin, a, y, z)))))
    out.append(_flag(f"general solver specialises to posc/plsc (max diff {spec:.2g})", spec <= 1e-10))
    n2 = float(np.max(np.abs(bid_eng(m1, lin, SharingContract.posc(0.4), y, z[:, None])
                             - bid_posc_sp(m1, lin, 0.4, y, z))))
    out.append(_flag(f"two-buyer english bid equals second price bid (max diff {n2:.2g})", n2 <= 1e-10))
    rng = RandomStream(7, 0).rng
    sig = -np.sort(-rng.random((50, 3)), axis=1)
    trip = 0.0
    for c in (SharingContract.plsc(0.5), SharingContract.posc(0.5), SharingContract.one_time()):
        p1 = english_strategy(cv, lin, c, 3, sig[:, 2], np.empty((50, 0)))
        p2 = english_strategy(cv, lin, c, 2, sig[:, 1], sig[:, 2:3])
        q = invert_drop_prices(cv, lin, c, np.stack([p1, p2], axis=1))
        trip = max(trip, float(np.max(np.abs(q - sig[:, [2, 1]]))))
    out.append(_flag(f"drop-price inversion round trip (max err {trip:.2g})", trip <= 1e-8))
    return out


def auction_checks(scope):
    m1 = make_model("example1")
    cv = make_model("common_value_avg", n_buyers=3)
    lin = Utility.linear()
    out = list(example1_revenue_suite())
    outcome = A.run_second_price(m1, BidFunction(m1, lin, SharingContract.posc(0.5)).fit(),
                                 SharingContract.posc(0.5), RandomStream(11, 0), count=10_000)
    gap = np.abs(outcome.auction_payment + outcome.sharing_payment + outcome.buyer_total_profit
                 - outcome.realized_value).max()
    out.append(_flag(f"stage revenues plus winner profit equal the value (max gap {gap:.2g})",
                     gap <= 1e-12))
    count = 1000 if scope == ALL else 100
    sig = RandomStream(13, 0).rng.random((count, 3))
    for c in (SharingContract.plsc(0.5), SharingContract.posc(0.5)):
        clock = A.run_english_clock(cv, lin, c, sig, 1e-4)
        direct = A.english_payment_direct(cv, lin, c, sig)
        err = float(np.max(np.abs(clock.auction_payment - direct.auction_payment)))
        same = bool(np.all(clock.winner_index == direct.winner_index))
        out.append(_flag(f"english clock matches direct payment, {c}, {count} profiles "
                         f"(max err {err:.2g})", err <= 1e-4 and same, -err))
    n = 1_000_000 if scope == ALL else 50_000
    for c in (SharingContract.plsc(0.5), SharingContract.posc(0.5), SharingContract.one_time()):
        mc = A.estimate_revenue(m1, lin, c, A.SECOND_PRICE, n, RandomStream(17, 0))
        exact = A.revenue_closed_form_example1(c.kind, c.alpha).total
        out.append(_agree(f"example1 {c} revenue, n={n}", mc, exact))
    if scope == ALL:
        n = 100_000
        rep = A.compare_contracts_paired(m1, lin, [SharingContract.posc(0.5), SharingContract.plsc(0.5)],
                                         n=n, seed=19)
        out.append(_positive_t("plsc(0.5) - posc(0.5) paired", rep.difference("posc(0.5)", "plsc(0.5)")))
        rep = A.compare_contracts_paired(m1, lin, [SharingContract.one_time(), SharingContract.posc(0.3)],
                                         n=n, seed=19)
        out.append(_not_below("posc(0.3) - one_time paired", rep.difference("one_time", "posc(0.3)")))
        rep = A.compare_contracts_paired(m1, lin, [SharingContract.plsc(0.2), SharingContract.plsc(0.4)],
                                         n=n, seed=19)
        out.append(_positive_t("plsc(0.4) - plsc(0.2) paired", rep.difference("plsc(0.2)", "plsc(0.4)")))
        for a in (0.25, 0.5):
            rep = A.compare_formats_paired(cv, lin, SharingContract.plsc(a), n=n, seed=23)
            out.append(_not_below(f"english - second price, plsc({a:g}), common value",
                                  rep.difference(A.SECOND_PRICE, A.ENGLISH)))
        rep = A.compare_contracts_paired(
            m1, lin, [SharingContract.one_time(), BOUNDED_GENERAL, SharingContract.plsc(0.4)],
            n=n, seed=29, labels=["zero", "phi", "plsc"])
        out.append(_not_below("bounded rule - one_time paired", rep.difference("zero", "phi")))
        out.append(_not_below("plsc(0.4) - bounded rule paired", rep.difference("phi", "plsc")))
    return out


def pa_checks(scope):
    e2 = make_model("example2_pa")
    lin = Utility.linear()
    out = []
    for w, target in ((0.0, 0.25), (-0.3, 0.3), (-0.8, 0.5)):
        out.append(_within(f"ex-post effort at w={w:g} (gamma=1, alpha=0.5)",
                           PA.optimal_effort_posc_expost(1.0, 0.5, w), target, 0.0))
    worst = np.inf
    for g in (0.25, 0.5, 1.0, 2.0):
        cost = PA.CostFunction.quadratic(g)
        for a in np.linspace(0, 0.95, 20):
            w = np.linspace(-3, 3, 301)
            worst = min(worst, float(np.min(PA.optimal_effort_posc_expost(g, a, w)
                                            - PA.optimal_effort_plsc(cost, a))))
    out.append(_flag("ex-post posc effort >= plsc effort on (gamma, alpha, w) grid", worst >= 0, worst))
    err = 0.0
    for g in (0.5, 1.0, 2.0):
        cost = PA.CostFunction.quadratic(g)
        for a in (0.0, 0.3, 0.6):
            quad = PA.revenue_plsc_pa_quadrature(e2, lin, cost, a).total
            err = max(err, abs(quad - (1 / 3 + 1 / (4 * g) + a / 6 - a * a / (4 * g))))
    out.append(_flag(f"hidden-effort plsc quadrature matches closed form (max err {err:.2g})",
                     err <= 1e-8))
    grid = np.round(np.arange(0, 0.9501, 0.01), 10)
    curve = [PA.revenue_plsc_pa_closed_form(1.0, a).total for a in grid]
    out.append(_within("hidden-effort plsc argmax at gamma=1", grid[int(np.argmax(curve))], 1 / 3, 0.01))
    fd = PA.derivative_at_zero(lambda a: PA.revenue_plsc_pa_closed_form(1.0, a).total, 1e-3)
    out.append(_within("closed-form derivative at zero, gamma=1", fd.value, 1 / 6, 1e-3))
    alphas = np.round(np.arange(0, 0.951, 0.05), 10)
    posc = [PA.revenue_posc_pa_quadrature(e2, 0.25, a).total for a in alphas]
    best = alphas[int(np.argmax(posc))]
    out.append(_flag(f"hidden-effort posc argmax interior at gamma=0.25 (alpha={best:g})", best < 0.95))
    if scope == ALL:
        n = 1_000_000
        cost = PA.CostFunction.quadratic(1.0)
        rep = PA.compare_pa_paired(e2, lin, cost, [(PA.POSC_PA, 0.0), (PA.POSC_PA, 0.3)], n=n, seed=31)
        out.append(_positive_t("hidden-effort posc(0.3) - one_time, gamma=1",
                               rep.difference("posc_pa(0)", "posc_pa(0.3)")))
        curve = PA.paired_pa_curve(e2, lin, cost, PA.PLSC_PA, n=n, seed=37)
        fd = PA.derivative_at_zero(curve, 0.05)
        out.append(_flag(f"paired derivative at zero, plsc, gamma=1: {fd.value:.4f}, t = {fd.t_stat:.1f}",
                         fd.t_stat > 3))
        cost = PA.CostFunction.quadratic(0.25)
        rep = PA.compare_pa_paired(e2, lin, cost, [(PA.PLSC_PA, 0.9), (PA.POSC_PA, 0.9)],
                                   n=100_000, seed=41)
        out.append(_positive_t("hidden-effort posc above plsc at gamma=0.25, alpha=0.9",
                               rep.difference("plsc_pa(0.9)", "posc_pa(0.9)")))
        for g in (0.5, 1.0, 2.0):
            for a in (0.0, 0.5):
                mc = PA.revenue_plsc_pa(e2, lin, PA.CostFunction.quadratic(g), a, 100_000,
                                        RandomStream(43, int(10 * g + a * 100)))
                out.append(_agree(f"hidden-effort plsc revenue gamma={g:g} alpha={a:g}", mc,
                                  PA.revenue_plsc_pa_closed_form(g, a).total))
    return out


def verify_suite(scope=FAST, contracts=None, echo=None):
    """Run the selected invariants; ``contracts`` adds rules to the admissibility check."""
    if scope not in (FAST, ALL):
        raise ValueError(f"scope must be {FAST!r} or {ALL!r}")
    t0 = time.perf_counter()
    shipped = [SharingContract.posc(0.5), SharingContract.plsc(0.5), BOUNDED_GENERAL]
    report = VerifyReport(scope)
    groups = [numerics_checks, model_checks, lambda: contract_checks(shipped + list(contracts or [])),
              bid_checks, lambda: auction_checks(scope), lambda: pa_checks(scope)]
    for group in groups:
        try:
            checks = group()
        except PSCError as err:
            checks = [_flag(f"{type(err).__name__}: {err}", False)]
        for c in checks:
            report.checks.append(c)
            if echo is not None:
                echo(c.line())
    report.seconds = time.perf_counter() - t0
    return report
