"""Money utilities for weakly risk averse buyers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

LINEAR = "linear"
CARA = "cara"
CUSTOM = "custom"


class Utility:
    """Increasing concave utility of money normalised so that ``u(0) = 0``.

    Use the constructors :meth:`linear`, :meth:`cara` and :meth:`custom`.
    Calling the object evaluates ``u`` elementwise.
    """

    def __init__(self, kind, params=None, table=None):
        self.kind = kind
        self.params = dict(params or {})
        self._table = table

    @classmethod
    def linear(cls):
        return cls(LINEAR)

    @classmethod
    def cara(cls, A=1.0, c=1.0):
        if A <= 0 or c <= 0:
            raise ValueError("CARA utility needs A > 0 and c > 0")
        return cls(CARA, {"A": float(A), "c": float(c)})

    @classmethod
    def custom(cls, xs, us, validate=True):
        """Tabulated utility, linear between nodes and extended with the end slopes.

        With ``validate=True`` the table must pass :func:`verify_utility`.
        """
        xs = np.asarray(xs, dtype=float)
        us = np.asarray(us, dtype=float)
        if xs.ndim != 1 or xs.shape != us.shape or xs.size < 2:
            raise ValueError("utility table needs matching 1-d arrays of length >= 2")
        if np.any(np.diff(xs) <= 0):
            raise ValueError("utility table x-values must be strictly increasing")
        u = cls(CUSTOM, table=(xs, us))
        if validate:
            report = verify_utility(u, xs)
            if not report.ok:
                raise ValueError(f"utility table rejected: {report.violations[0]}")
        return u

    @property
    def is_linear(self):
        return self.kind == LINEAR

    def __repr__(self):
        if self.kind == CUSTOM:
            return f"Utility.custom(<{self._table[0].size} nodes>)"
        args = ", ".join(f"{k}={v:g}" for k, v in self.params.items())
        return f"Utility.{self.kind}({args})"

    def __eq__(self, other):
        if not isinstance(other, Utility) or self.kind != other.kind:
            return False
        if self.kind == CUSTOM:
            return all(np.array_equal(a, b) for a, b in zip(self._table, other._table))
        return self.params == other.params

    def __hash__(self):
        return hash((self.kind, tuple(sorted(self.params.items()))))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == LINEAR:
            return x
        if self.kind == CARA:
            A, c = self.params["A"], self.params["c"]
            return A * -np.expm1(-c * x)
        xs, us = self._table
        inside = np.interp(x, xs, us)
        lo_slope = (us[1] - us[0]) / (xs[1] - xs[0])
        hi_slope = (us[-1] - us[-2]) / (xs[-1] - xs[-2])
        out = np.where(x < xs[0], us[0] + lo_slope * (x - xs[0]), inside)
        return np.where(x > xs[-1], us[-1] + hi_slope * (x - xs[-1]), out)


def eval_utility(u, x):
    out = u(x)
    return float(out) if np.ndim(out) == 0 else out


@dataclass
class UtilityReport:
    grid: np.ndarray
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations


def verify_utility(u, grid=None, tol=1e-12):
    """Check normalisation, strict increase and concavity of ``u`` on ``grid``."""
    grid = np.linspace(-2.0, 2.0, 81) if grid is None else np.sort(np.asarray(grid, dtype=float))
    report = UtilityReport(grid)
    u0 = float(u(np.array(0.0)))
    if abs(u0) > tol:
        report.violations.append(("normalisation", 0.0, u0))
    vals = u(grid)
    for i in np.nonzero(np.diff(vals) <= 0)[0]:
        report.violations.append(("increasing", float(grid[i]), float(vals[i + 1] - vals[i])))
    if grid.size >= 3:
        left, mid, right = grid[:-2], grid[1:-1], grid[2:]
        lam = (right - mid) / (right - left)
        chord = lam * vals[:-2] + (1.0 - lam) * vals[2:]
        gap = vals[1:-1] - chord
        for i in np.nonzero(gap < -tol)[0]:
            report.violations.append(("concave", float(mid[i]), float(gap[i])))
    return report


def make_utility(spec):
    """Build a utility from a config mapping such as ``{"kind": "cara", "A": 1, "c": 2}``."""
    if isinstance(spec, Utility):
        return spec
    if spec is None or spec == LINEAR:
        return Utility.linear()
    spec = dict(spec)
    kind = spec.pop("kind", LINEAR)
    if kind == LINEAR:
        return Utility.linear()
    if kind == CARA:
        return Utility.cara(spec.get("A", 1.0), spec.get("c", 1.0))
    if kind == CUSTOM:
        return Utility.custom(spec["x"], spec["u"])
    raise ValueError(f"unknown utility kind {kind!r}")
