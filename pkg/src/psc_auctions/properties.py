"""Grid checks of the monotonicity and bound properties of bids and revenues.

Each suite returns a list of :class:`Check` records. Weak inequalities are
checked up to ``tol``; a strict inequality additionally requires the gap to
exceed ``tol``, and is only asserted where the conditional value law is
nondegenerate (positive variance), since with a deterministic value every
contract leads to the same bid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .auctions import revenue_closed_form_example1, revenue_quadrature
from .contracts import SharingContract
from .equilibrium import bid_eng, bid_plsc_sp, bid_posc_sp
from .preferences import Utility

SOLVER_TOL = 1e-9
DEFAULT_ALPHAS = np.arange(8) / 8.0


@dataclass
class Check:
    name: str
    passed: bool
    points: int
    violations: int
    worst: float = 0.0

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: {self.violations}/{self.points} violations (worst {self.worst:.3g})"


def _check(name, gap, mask=None):
    """``gap`` must be >= 0 wherever ``mask`` holds; NaNs are ignored."""
    gap = np.asarray(gap, dtype=float)
    keep = ~np.isnan(gap)
    if mask is not None:
        keep &= np.broadcast_to(mask, gap.shape)
    g = gap[keep]
    bad = g < 0
    worst = float(g.min()) if g.size else 0.0
    return Check(name, not bad.any(), int(g.size), int(bad.sum()), min(worst, 0.0))


def weakly_up(name, d, tol=SOLVER_TOL, mask=None):
    return _check(name, d + tol, mask)


def strictly_up(name, d, tol=SOLVER_TOL, mask=None):
    return _check(name, d - tol, mask)


def midpoint_grid(model, count=16):
    lo, hi = model.signal_interval
    return lo + (hi - lo) * (np.arange(count) + 0.5) / count


def _pair_stats(model, yy, zz):
    law = model.pair_law(yy.ravel(), zz.ravel())
    mean = law.mean()
    var = law.expect(lambda x: (x - mean[:, None]) ** 2)
    return mean.reshape(yy.shape), var.reshape(yy.shape)


def second_price_bid_suite(model, u, alphas=DEFAULT_ALPHAS, count=16, tol=SOLVER_TOL):
    """Monotonicity and bounds of the POSC and PLSC second price bids.

    Arrays are indexed (alpha, y1, z1).
    """
    g = midpoint_grid(model, count)
    yy, zz = np.meshgrid(g, g, indexing="ij")
    alphas = np.asarray(alphas, dtype=float)
    s = np.stack([bid_posc_sp(model, u, a, yy.ravel(), zz.ravel()).reshape(yy.shape) for a in alphas])
    t = np.stack([bid_plsc_sp(model, u, a, yy.ravel(), zz.ravel()).reshape(yy.shape) for a in alphas])
    mean, var = _pair_stats(model, yy, zz)
    spread = (var > 1e-12)[None]
    strict_u = not u.is_linear
    pos_alpha = (alphas > 0)[:, None, None]
    checks = [
        strictly_up("posc bid increasing in y1", np.diff(s, axis=1), tol),
        weakly_up("posc bid nondecreasing in z1", np.diff(s, axis=2), tol),
        strictly_up("posc bid decreasing in alpha", -np.diff(s, axis=0), tol, spread),
        weakly_up("posc bid <= conditional mean", mean - s, tol),
        strictly_up("posc bid < conditional mean unless alpha = 0 and u linear",
                    mean - s, tol, spread & (pos_alpha | strict_u)),
        strictly_up("posc bid positive at alpha = 0", s[alphas == 0.0], 0.0),
        strictly_up("plsc bid increasing in y1", np.diff(t, axis=1), tol),
        weakly_up("plsc bid nondecreasing in z1", np.diff(t, axis=2), tol),
        weakly_up("plsc bid nondecreasing in alpha", np.diff(t, axis=0), tol),
        strictly_up("plsc bid positive", t, 0.0),
        weakly_up("posc bid <= plsc bid", t - s, tol),
        strictly_up("posc bid < plsc bid for alpha > 0", t - s, tol, spread & pos_alpha),
        weakly_up("posc and plsc bids equal at alpha = 0", -np.abs(t - s), tol,
                  np.broadcast_to(~pos_alpha, s.shape)),
        weakly_up("plsc bid <= conditional mean", mean - t, tol),
    ]
    if strict_u:
        checks.append(strictly_up("plsc bid increasing in alpha (strictly concave u)",
                                  np.diff(t, axis=0), tol, spread))
        checks.append(strictly_up("plsc bid < conditional mean (strictly concave u)",
                                  mean - t, tol, spread))
    return checks


def english_bid_suite(model, u, alphas=DEFAULT_ALPHAS, count=16, tol=SOLVER_TOL):
    """Same statements for the full-conditioning English bids.

    For three buyers the arrays are indexed (alpha, y1, z1, z2) with NaN where
    ``z2 > z1``; for two buyers the last axis is absent.
    """
    n = model.n_buyers
    if n not in (2, 3):
        raise ValueError("the English bid suite covers two and three buyers")
    g = midpoint_grid(model, count)
    if n == 2:
        grids = np.meshgrid(g, g, indexing="ij")
        valid = np.ones(grids[0].shape, dtype=bool)
    else:
        grids = np.meshgrid(g, g, g, indexing="ij")
        valid = grids[2] <= grids[1]
    y = grids[0][valid]
    z = np.stack([gr[valid] for gr in grids[1:]], axis=1)
    law = model.full_law(y, z)
    mean_v = law.mean()
    var_v = law.expect(lambda x: (x - mean_v[:, None]) ** 2)

    def fill(values):
        out = np.full(valid.shape, np.nan)
        out[valid] = values
        return out

    alphas = np.asarray(alphas, dtype=float)
    s = np.stack([fill(bid_eng(model, u, SharingContract.posc(a), y, z)) for a in alphas])
    t = np.stack([fill(bid_eng(model, u, SharingContract.plsc(a), y, z)) for a in alphas])
    mean = fill(mean_v)[None]
    spread = fill(var_v)[None] > 1e-12
    pos_alpha = (alphas > 0).reshape((-1,) + (1,) * valid.ndim)
    checks = []
    for name, b in (("posc", s), ("plsc", t)):
        checks.append(strictly_up(f"english {name} bid increasing in y1", np.diff(b, axis=1), tol))
        for k in range(2, b.ndim):
            checks.append(weakly_up(f"english {name} bid nondecreasing in z{k - 1}",
                                    np.diff(b, axis=k), tol))
    checks += [
        weakly_up("english posc bid nonincreasing in alpha", -np.diff(s, axis=0), tol),
        strictly_up("english posc bid decreasing in alpha (nondegenerate value)",
                    -np.diff(s, axis=0), tol, spread),
        weakly_up("english plsc bid nondecreasing in alpha", np.diff(t, axis=0), tol),
        strictly_up("english plsc bid positive", t, 0.0),
        weakly_up("english posc bid <= plsc bid", t - s, tol),
        strictly_up("english posc bid < plsc bid for alpha > 0 (nondegenerate value)",
                    t - s, tol, spread & pos_alpha),
        weakly_up("english plsc bid <= conditional mean", mean - t, tol),
    ]
    if not u.is_linear:
        checks.append(strictly_up("english plsc bid increasing in alpha (strictly concave u)",
                                  np.diff(t, axis=0), tol, spread))
    return checks


def example1_revenue_suite(alphas=None, tol=1e-9, cross_check=True):
    """Revenue orderings of the two-buyer Bernoulli example on a share-fraction grid."""
    alphas = np.round(np.arange(10) / 10.0, 10) if alphas is None else np.asarray(alphas, dtype=float)
    posc = [revenue_closed_form_example1("posc", a) for a in alphas]
    plsc = [revenue_closed_form_example1("plsc", a) for a in alphas]
    p_tot = np.array([r.total for r in posc])
    l_tot = np.array([r.total for r in plsc])
    s1 = np.array([r.stage1 for r in posc])
    s2 = np.array([r.stage2 for r in posc])
    pos = alphas > 0
    checks = [
        weakly_up("posc total revenue nondecreasing in alpha", np.diff(p_tot), tol),
        strictly_up("plsc total revenue increasing in alpha", np.diff(l_tot), tol),
        weakly_up("plsc total >= posc total", l_tot - p_tot, tol),
        strictly_up("plsc total > posc total for alpha > 0", l_tot - p_tot, tol, pos),
        strictly_up("posc auction-stage revenue decreasing in alpha", -np.diff(s1), tol),
        strictly_up("posc sharing-stage revenue positive for alpha > 0", s2, tol, pos),
        strictly_up("posc sharing-stage revenue increasing in alpha", np.diff(s2), tol),
        strictly_up("posc total > one-time total for alpha > 0",
                    p_tot - revenue_closed_form_example1("one_time").total, tol, pos),
    ]
    if cross_check:
        from .info_model import Example1

        model = Example1()
        u = Utility.linear()
        quad = np.array([revenue_quadrature(model, u, SharingContract.posc(a), nodes=48).total
                         for a in alphas])
        checks.append(weakly_up("posc closed form matches two-buyer quadrature to 1e-8",
                                -np.abs(quad - p_tot), 1e-8))
    return checks
