"""Numerical kernels: monotone root bracketing, Gauss-Legendre quadrature,
monotone interpolation and splittable random streams.

Every kernel works elementwise on numpy arrays so that thousands of
indifference equations can be solved in one pass.
"""

from __future__ import annotations

import functools
import warnings

import numpy as np

from .exceptions import BracketFailure, NonFinite, OutOfRange

DEFAULT_ABS_TOL = 1e-10
MAX_EXPANSIONS = 60


def _finite_or_raise(values, what):
    values = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(values)):
        raise NonFinite(f"{what} returned a non-finite value")
    return values


def solve_monotone_root(f, hint, abs_tol=DEFAULT_ABS_TOL, *, lo=None, hi=None,
                        max_expansions=MAX_EXPANSIONS):
    """Find the zero of a continuous, strictly decreasing function by bisection.

    ``f`` is called with an array shaped like ``hint`` and must return an array
    of the same shape; each element is an independent equation. Without
    explicit ``lo``/``hi`` the bracket starts at ``hint -/+ 1`` and the step
    doubles until the sign changes. Negative roots are allowed.

    Returns a float for scalar hints, otherwise an array.
    """
    if abs_tol <= 0:
        raise ValueError("abs_tol must be positive")
    scalar = np.ndim(hint) == 0
    hint = np.atleast_1d(np.asarray(hint, dtype=float)).copy()
    shape = hint.shape

    def call(b):
        return _finite_or_raise(np.broadcast_to(f(b), shape), "root target")

    if lo is not None or hi is not None:
        a = np.broadcast_to(np.asarray(lo if lo is not None else hint - 1.0, dtype=float), shape).copy()
        c = np.broadcast_to(np.asarray(hi if hi is not None else hint + 1.0, dtype=float), shape).copy()
        fa, fc = call(a), call(c)
        bad = (fa < 0) | (fc > 0)
        if np.any(bad):
            raise BracketFailure(
                f"no sign change on the supplied bracket for {int(bad.sum())} equation(s)")
    else:
        step = np.ones(shape)
        a, c = hint - step, hint + step
        fa, fc = call(a), call(c)
        for _ in range(max_expansions):
            need_lo = fa < 0
            need_hi = fc > 0
            if not (need_lo.any() or need_hi.any()):
                break
            step = np.where(need_lo | need_hi, 2.0 * step, step)
            # the end that overshot becomes the opposite end of the new bracket
            c, fc = np.where(need_lo, a, c), np.where(need_lo, fa, fc)
            a, fa = np.where(need_hi, c, a), np.where(need_hi, fc, fa)
            a = np.where(need_lo, hint - step, a)
            c = np.where(need_hi, hint + step, c)
            fa = np.where(need_lo, call(a), fa)
            fc = np.where(need_hi, call(c), fc)
        if np.any((fa < 0) | (fc > 0)):
            raise BracketFailure(
                f"no sign change within {max_expansions} bracket doublings")

    done_lo = fa == 0
    done_hi = fc == 0
    c = np.where(done_lo, a, c)
    a = np.where(done_hi, c, a)
    while True:
        width = c - a
        if np.all(width <= 2.0 * abs_tol):
            break
        mid = 0.5 * (a + c)
        stuck = (mid <= a) | (mid >= c)
        if np.all(stuck | (width <= 2.0 * abs_tol)):
            break
        fm = call(mid)
        go_right = fm > 0
        a = np.where(go_right, mid, a)
        c = np.where(go_right, c, mid)
        exact = fm == 0
        a = np.where(exact, mid, a)
        c = np.where(exact, mid, c)
    root = 0.5 * (a + c)
    return float(root[0]) if scalar else root


@functools.lru_cache(maxsize=64)
def gauss_legendre(nodes):
    """Nodes and weights of the ``nodes``-point rule on [-1, 1]."""
    if nodes < 1:
        raise ValueError("need at least one node")
    x, w = np.polynomial.legendre.leggauss(nodes)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def integrate_1d(f, a, b, nodes=32, *, adaptive=False, tol=1e-10, max_nodes=4096):
    """Gauss-Legendre estimate of the integral of ``f`` over [a, b].

    ``f`` receives an array of abscissae. With ``adaptive=True`` the node
    count doubles until two successive estimates differ by less than ``tol``.
    """
    if nodes < 2:
        raise ValueError("nodes must be at least 2")

    def rule(n):
        x, w = gauss_legendre(n)
        half = 0.5 * (b - a)
        values = _finite_or_raise(f(half * x + 0.5 * (a + b)), "integrand")
        return half * float(np.dot(w, values))

    estimate = rule(nodes)
    if not adaptive:
        return estimate
    n = nodes
    while n < max_nodes:
        n *= 2
        refined = rule(n)
        if abs(refined - estimate) < tol:
            return refined
        estimate = refined
    warnings.warn(f"adaptive quadrature stopped at {n} nodes without reaching tol={tol}",
                  RuntimeWarning, stacklevel=2)
    return estimate


def monotone_interpolate(grid_y, grid_b, query, *, atol=1e-12):
    """Piecewise-linear interpolation through a monotone table.

    Exact at the nodes and monotone between them. Raises ``OutOfRange`` for
    queries outside ``[grid_y[0], grid_y[-1]]`` (up to ``atol``).
    """
    grid_y = np.asarray(grid_y, dtype=float)
    grid_b = np.asarray(grid_b, dtype=float)
    if grid_y.ndim != 1 or grid_y.shape != grid_b.shape or grid_y.size < 2:
        raise ValueError("grid must be two 1-d arrays of equal length >= 2")
    if np.any(np.diff(grid_y) <= 0):
        raise ValueError("grid y-values must be strictly increasing")
    if np.any(np.diff(grid_b) < 0):
        raise ValueError("grid b-values must be nondecreasing")
    q = np.asarray(query, dtype=float)
    if np.any(q < grid_y[0] - atol) or np.any(q > grid_y[-1] + atol):
        raise OutOfRange(f"query outside [{grid_y[0]}, {grid_y[-1]}]")
    out = np.interp(q, grid_y, grid_b)
    return float(out) if out.ndim == 0 else out


class RandomStream:
    """Counter-based random stream keyed by ``(seed, stream_id)``.

    Backed by the Philox generator, so distinct keys give independent
    sequences and identical keys replay identical draws.
    """

    def __init__(self, seed, stream_id=0):
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self.stream_id = int(stream_id) & 0xFFFFFFFFFFFFFFFF
        key = np.array([self.seed, self.stream_id], dtype=np.uint64)
        self._bitgen = np.random.Philox(key=key)
        self.rng = np.random.Generator(self._bitgen)

    def __repr__(self):
        return f"RandomStream(seed={self.seed}, stream_id={self.stream_id})"

    @property
    def counter(self):
        return int(self._bitgen.state["state"]["counter"][0])

    def child(self, index):
        """Derive an independent stream for a worker, block or replicate."""
        mixed = np.random.SeedSequence([self.stream_id, int(index), 0x5EED]).generate_state(
            1, np.uint64)[0]
        return RandomStream(self.seed, int(mixed))

    def uniform(self, low=0.0, high=1.0, size=None):
        return self.rng.uniform(low, high, size)

    def random(self, size=None):
        return self.rng.random(size)
