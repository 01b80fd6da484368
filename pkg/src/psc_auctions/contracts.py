"""Ex-post sharing rules applied to the preliminary profit ``w = x - b``."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .validation import check_alpha

ONE_TIME = "one_time"
POSC = "posc"
PLSC = "plsc"
GENERAL = "general"


@dataclass(frozen=True)
class SharingContract:
    """A sharing rule ``phi``.

    ``general`` contracts are continuous piecewise-linear: ``breakpoints`` are
    sorted profit levels and ``values`` the rule at those levels. Outside the
    table the first and last segment slopes are continued.
    """

    kind: str
    alpha: float = 0.0
    breakpoints: tuple = ()
    values: tuple = ()

    @classmethod
    def one_time(cls):
        return cls(ONE_TIME)

    @classmethod
    def posc(cls, alpha):
        return cls(POSC, check_alpha(alpha))

    @classmethod
    def plsc(cls, alpha):
        return cls(PLSC, check_alpha(alpha))

    @classmethod
    def general(cls, breakpoints, values):
        w = tuple(float(v) for v in breakpoints)
        phi = tuple(float(v) for v in values)
        if len(w) < 2 or len(w) != len(phi):
            raise ValueError("general contracts need >= 2 breakpoints with matching values")
        if any(b <= a for a, b in zip(w, w[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        return cls(GENERAL, 0.0, w, phi)

    def __str__(self):
        if self.kind in (POSC, PLSC):
            return f"{self.kind}({self.alpha:g})"
        if self.kind == GENERAL:
            return f"general({len(self.breakpoints)} breakpoints)"
        return self.kind

    @property
    def label(self):
        return self.kind

    def slopes(self):
        """Segment slopes of a general rule; the end segments also cover the extrapolation."""
        w = np.asarray(self.breakpoints)
        phi = np.asarray(self.values)
        return np.diff(phi) / np.diff(w)

    def kinks(self):
        """Preliminary-profit levels where ``phi`` is not differentiable."""
        if self.kind == POSC and self.alpha > 0:
            return np.array([0.0])
        if self.kind == GENERAL:
            return np.asarray(self.breakpoints, dtype=float)
        return np.empty(0)

    def payment(self, w):
        w = np.asarray(w, dtype=float)
        if self.kind == ONE_TIME:
            return np.zeros_like(w)
        if self.kind == POSC:
            return self.alpha * np.maximum(w, 0.0)
        if self.kind == PLSC:
            return self.alpha * w
        bw = np.asarray(self.breakpoints)
        bphi = np.asarray(self.values)
        slopes = self.slopes()
        out = np.interp(w, bw, bphi)
        out = np.where(w < bw[0], bphi[0] + slopes[0] * (w - bw[0]), out)
        return np.where(w > bw[-1], bphi[-1] + slopes[-1] * (w - bw[-1]), out)

    __call__ = payment


def sharing_payment(contract, w):
    out = contract.payment(w)
    return float(out) if np.ndim(out) == 0 else out


def make_contract(spec, alpha=None):
    """Build a contract from a name plus share fraction, or from a config mapping."""
    if isinstance(spec, SharingContract):
        return spec
    if isinstance(spec, str):
        spec = {"kind": spec}
    spec = dict(spec)
    kind = spec.get("kind")
    a = spec.get("alpha", alpha if alpha is not None else 0.0)
    if kind == ONE_TIME:
        return SharingContract.one_time()
    if kind == POSC:
        return SharingContract.posc(a)
    if kind == PLSC:
        return SharingContract.plsc(a)
    if kind == GENERAL:
        if "breakpoints" not in spec or "values" not in spec:
            raise ValueError("a general contract needs 'breakpoints' and 'values'")
        return SharingContract.general(spec["breakpoints"], spec["values"])
    raise ValueError(f"unknown contract kind {kind!r}")


@dataclass
class AdmissibilityReport:
    contract: SharingContract
    grid: np.ndarray
    violations: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    def flagged(self, prop):
        return prop in self.violations


def default_profit_grid(value_interval=(-2.0, 2.0), points=801):
    lo, hi = value_interval
    span = hi - lo
    return np.linspace(lo - span - 1.0, hi + span + 1.0, points)


def check_admissible(contract, grid=None, tol=1e-12):
    """Check the admissibility properties of ``contract`` on a profit grid.

    (i) ``phi`` nondecreasing and ``w - phi(w)`` increasing; (ii) ``phi(0) = 0``
    with ``phi`` positive at the top of the grid and a positive terminal
    slope, the finite stand-in for ``phi`` growing without bound; (iii) no jump
    between adjacent grid points beyond the steepest segment slope times the
    spacing.
    """
    grid = default_profit_grid() if grid is None else np.asarray(grid, dtype=float)
    pts = [grid, [0.0]]
    if contract.kind == GENERAL:
        pts.append(contract.breakpoints)
    w = np.unique(np.concatenate([np.asarray(p, dtype=float) for p in pts]))
    phi = contract.payment(w)
    report = AdmissibilityReport(contract, w)

    dphi = np.diff(phi)
    dnet = np.diff(w - phi)
    bad = np.nonzero((dphi < -tol) | (dnet <= 0.0))[0]
    if bad.size:
        report.violations["i"] = [(float(w[k]), float(w[k + 1])) for k in bad]

    problems = []
    phi0 = float(contract.payment(np.array(0.0)))
    if abs(phi0) > tol:
        problems.append(f"phi(0) = {phi0:g}")
    if contract.kind == ONE_TIME:
        terminal = 0.0
    elif contract.kind in (POSC, PLSC):
        terminal = contract.alpha
    else:
        terminal = float(contract.slopes()[-1])
    if not phi[-1] > 0:
        problems.append(f"phi(w_max) = {phi[-1]:g} is not positive")
    if not terminal > 0:
        problems.append(f"terminal slope {terminal:g} is not positive")
    if problems:
        report.violations["ii"] = problems
    report.notes.append("unbounded growth checked through a positive terminal slope")

    if contract.kind == GENERAL:
        lipschitz = float(np.max(np.abs(contract.slopes())))
    else:
        lipschitz = abs(contract.alpha)
    jumps = np.abs(dphi) - lipschitz * np.diff(w)
    bad = np.nonzero(jumps > 1e-9)[0]
    if bad.size:
        report.violations["iii"] = [(float(w[k]), float(w[k + 1])) for k in bad]
    return report


def marginal_slope_bound(contract):
    """Smallest ``a`` with ``phi(w + d) - phi(w) <= a d`` for all ``w`` and ``d > 0``."""
    if contract.kind == ONE_TIME:
        return 0.0
    if contract.kind in (POSC, PLSC):
        return contract.alpha
    return float(np.max(contract.slopes()))
