"""Batched one-dimensional conditional laws of the value ``X1``.

A law object describes, for a batch of conditioning points, the distribution
of the value. ``expect(fn, kinks)`` integrates ``fn`` against every member of
the batch at once; ``fn`` receives an array of abscissae shaped
``(batch, nodes)``. Continuous laws split their support at the supplied kink
locations so that piecewise-smooth integrands (sharing rules, effort
policies) are integrated exactly by Gauss-Legendre rules on each piece.
"""

from __future__ import annotations

import math

import numpy as np

from .numerics import gauss_legendre

NODES_PER_PIECE = 16


def _as_batch(*arrays):
    arrays = np.broadcast_arrays(*[np.atleast_1d(np.asarray(a, dtype=float)) for a in arrays])
    return [a.reshape(-1) for a in arrays]


def _piecewise_nodes(lo, hi, cuts, m=NODES_PER_PIECE):
    """Gauss-Legendre nodes on ``[lo, hi]`` split at ``cuts`` (batch, k)."""
    lo = lo[:, None]
    hi = hi[:, None]
    if cuts is None or cuts.shape[1] == 0:
        edges = np.concatenate([lo, hi], axis=1)
    else:
        inner = np.sort(np.clip(cuts, lo, hi), axis=1)
        edges = np.concatenate([lo, inner, hi], axis=1)
    x, w = gauss_legendre(m)
    left = edges[:, :-1, None]
    half = 0.5 * (edges[:, 1:, None] - left)
    nodes = left + half * (x + 1.0)
    weights = half * w
    batch = lo.shape[0]
    return nodes.reshape(batch, -1), weights.reshape(batch, -1)


def _normalise(weights, nodes):
    total = weights.sum(axis=1, keepdims=True)
    degenerate = total[:, 0] <= 0
    if np.any(degenerate):
        weights = weights.copy()
        weights[degenerate] = 1.0 / nodes.shape[1]
        total = weights.sum(axis=1, keepdims=True)
    return weights / total


class DiscreteLaw:
    """Finitely many atoms per batch member (also used for empirical laws)."""

    def __init__(self, atoms, probs):
        self.atoms = np.atleast_2d(np.asarray(atoms, dtype=float))
        self.probs = np.broadcast_to(np.atleast_2d(np.asarray(probs, dtype=float)),
                                     self.atoms.shape)

    @classmethod
    def point(cls, x):
        x = np.atleast_1d(np.asarray(x, dtype=float)).reshape(-1, 1)
        return cls(x, np.ones_like(x))

    @classmethod
    def bernoulli(cls, p):
        p = np.atleast_1d(np.asarray(p, dtype=float)).reshape(-1, 1)
        atoms = np.broadcast_to(np.array([[0.0, 1.0]]), (p.shape[0], 2))
        return cls(atoms, np.concatenate([1.0 - p, p], axis=1))

    @classmethod
    def empirical(cls, samples):
        samples = np.atleast_2d(np.asarray(samples, dtype=float))
        return cls(samples, np.full(samples.shape, 1.0 / samples.shape[1]))

    @property
    def batch_size(self):
        return self.atoms.shape[0]

    def expect(self, fn, kinks=None):
        return np.sum(self.probs * fn(self.atoms), axis=1)

    def mean(self):
        return np.sum(self.probs * self.atoms, axis=1)

    def sample(self, rng):
        cdf = np.cumsum(self.probs, axis=1)
        u = rng.random((self.batch_size, 1))
        idx = np.minimum((u > cdf).sum(axis=1), self.atoms.shape[1] - 1)
        return self.atoms[np.arange(self.batch_size), idx]


class UniformLaw:
    """Uniform distribution on ``[lo, hi]`` for each batch member."""

    def __init__(self, lo, hi):
        self.lo, self.hi = _as_batch(lo, hi)

    @property
    def batch_size(self):
        return self.lo.shape[0]

    def expect(self, fn, kinks=None):
        cuts = None if kinks is None else np.broadcast_to(
            np.atleast_2d(kinks), (self.batch_size, np.atleast_2d(kinks).shape[1]))
        nodes, weights = _piecewise_nodes(self.lo, self.hi, cuts)
        weights = _normalise(weights, nodes)
        return np.sum(weights * fn(nodes), axis=1)

    def mean(self):
        return 0.5 * (self.lo + self.hi)

    def sample(self, rng):
        return self.lo + (self.hi - self.lo) * rng.random(self.batch_size)


class IrwinHallLaw:
    """``offset + scale * S`` where ``S`` is a sum of ``k`` iid uniform(0, 1).

    The density of ``S`` is a polynomial between consecutive integers, so the
    support is split at those integers as well as at the caller's kinks.
    """

    def __init__(self, offset, scale, k):
        if k < 1:
            raise ValueError("k must be at least 1")
        self.offset, self.scale = _as_batch(offset, scale)
        self.k = int(k)

    @property
    def batch_size(self):
        return self.offset.shape[0]

    def _density(self, s):
        k = self.k
        total = np.zeros_like(s)
        for j in range(k + 1):
            term = np.clip(s - j, 0.0, None) ** (k - 1) if k > 1 else (s >= j).astype(float)
            total += (-1) ** j * math.comb(k, j) * term
        return np.clip(total / math.factorial(k - 1), 0.0, None)

    def expect(self, fn, kinks=None):
        batch = self.batch_size
        ints = np.broadcast_to(np.arange(1, self.k, dtype=float), (batch, self.k - 1))
        cuts = ints
        if kinks is not None:
            kinks = np.broadcast_to(np.atleast_2d(kinks), (batch, np.atleast_2d(kinks).shape[1]))
            with np.errstate(divide="ignore", invalid="ignore"):
                ks = (kinks - self.offset[:, None]) / self.scale[:, None]
            ks = np.where(np.isfinite(ks), ks, 0.0)
            cuts = np.concatenate([ints, ks], axis=1)
        lo = np.zeros(batch)
        hi = np.full(batch, float(self.k))
        s, weights = _piecewise_nodes(lo, hi, cuts)
        weights = _normalise(weights * self._density(s), s)
        x = self.offset[:, None] + self.scale[:, None] * s
        return np.sum(weights * fn(x), axis=1)

    def mean(self):
        return self.offset + self.scale * (0.5 * self.k)

    def sample(self, rng):
        return self.offset + self.scale * rng.random((self.batch_size, self.k)).sum(axis=1)
