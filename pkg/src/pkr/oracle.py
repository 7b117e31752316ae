"""Brute-force reference solvers for desk-scale instances.

Everything here is deliberately naive: transport by enumerating unit-atom
matchings, the combined norm by grid search plus coordinate descent, the
dual by random feasible sampling. Correctness is meant to be self-evident
so these can anchor the test suite; nothing imports the production
solvers.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import NonZeroCharge, TooLarge, TooManyAtoms
from .holder import check_p, check_q, lp_combine
from .space import FiniteMetricSpace, SignedMeasure, tv_norm

ATOM_CAP = 8


@dataclass(frozen=True)
class RationalMeasure:
    """Measure with exactly representable weights numerators/denominator."""

    space: FiniteMetricSpace
    numerators: tuple[int, ...]
    denominator: int

    def __post_init__(self):
        nums = tuple(int(x) for x in self.numerators)
        if len(nums) != self.space.n:
            raise ValueError("numerator vector length must equal the number of points")
        den = int(self.denominator)
        if not 1 <= den <= 100:
            raise ValueError("denominator must lie in [1, 100]")
        object.__setattr__(self, "numerators", nums)
        object.__setattr__(self, "denominator", den)

    @property
    def atom_count(self) -> int:
        return sum(abs(x) for x in self.numerators)

    def to_measure(self) -> SignedMeasure:
        w = np.array(self.numerators, dtype=float) / self.denominator
        return SignedMeasure(self.space, w)


def oracle_kr(space: FiniteMetricSpace, xi: RationalMeasure) -> float:
    """Exact KR norm by enumerating all unit-atom matchings."""
    if xi.space is not space:
        raise ValueError("measure belongs to a different space instance")
    if sum(xi.numerators) != 0:
        raise NonZeroCharge(f"total charge {sum(xi.numerators)}/{xi.denominator} != 0")
    if xi.atom_count > ATOM_CAP:
        raise TooManyAtoms(f"{xi.atom_count} unit atoms exceed the cap of {ATOM_CAP}")

    sinks, sources = [], []
    for i, num in enumerate(xi.numerators):
        if num > 0:
            sinks.extend([i] * num)
        elif num < 0:
            sources.extend([i] * (-num))
    if not sources:
        return 0.0

    d = space.dist
    best = min(
        sum(float(d[s, t]) for s, t in zip(sources, perm))
        for perm in itertools.permutations(sinks)
    )
    return best / xi.denominator


def _kr_small(dist: np.ndarray, w: np.ndarray) -> float:
    """KR norm of a zero-charge vector on at most 3 points.

    With one atom on at least one side the optimal plan is forced (the
    triangle inequality rules out relays), so the cost is a direct sum.
    """
    pos = [(i, float(w[i])) for i in range(len(w)) if w[i] > 0.0]
    neg = [(i, float(-w[i])) for i in range(len(w)) if w[i] < 0.0]
    if not pos or not neg:
        return 0.0
    if len(neg) == 1:
        s = neg[0][0]
        return sum(m * float(dist[s, t]) for t, m in pos)
    if len(pos) == 1:
        t = pos[0][0]
        return sum(m * float(dist[s, t]) for s, m in neg)
    raise TooLarge("closed-form transport needs a singleton side (n <= 3)")


def _project_free(free: np.ndarray) -> np.ndarray:
    return np.append(free, -float(free.sum()))


def oracle_pk(space: FiniteMetricSpace, mu: SignedMeasure, p: float,
              grid_steps: int = 40) -> float:
    """Grid search plus coordinate descent for the combined norm, n <= 3.

    Zero-charge candidates live in the box tv(xi) <= 2 tv(mu): beyond it
    tv(mu - xi) >= tv(xi) - tv(mu) > tv(mu) already beats no candidate,
    since xi = 0 achieves objective tv(mu).
    """
    if mu.space is not space:
        raise ValueError("measure belongs to a different space instance")
    p = check_p(p)
    if space.n > 3:
        raise TooLarge("oracle_pk handles at most 3 points")
    if grid_steps < 10:
        raise ValueError("grid_steps must be at least 10")

    w = mu.weights
    box = 2.0 * tv_norm(mu)
    if box == 0.0:
        return 0.0
    dist = space.dist

    def score(free: np.ndarray) -> float:
        xi = _project_free(free)
        if float(np.abs(xi).sum()) > box * (1.0 + 1e-12):
            return math.inf
        resid = w - xi
        return lp_combine(_kr_small(dist, xi), float(np.abs(resid).sum()), p)

    ndim = space.n - 1
    if ndim == 0:
        return score(np.zeros(0))

    axis = np.linspace(-box, box, grid_steps + 1)
    best_free = np.zeros(ndim)
    best = score(best_free)
    for combo in itertools.product(axis, repeat=ndim):
        free = np.array(combo)
        val = score(free)
        if val < best:
            best, best_free = val, free

    # objective is convex in the free coordinates, so the true minimum lies
    # within one cell of the best grid point; shrink a local grid around it
    half = 2.0 * box / grid_steps
    local = 8
    while half > 1e-7 * max(1.0, box):
        offsets = np.linspace(-half, half, 2 * local + 1)
        center = best_free.copy()
        for combo in itertools.product(offsets, repeat=ndim):
            cand = center + np.array(combo)
            val = score(cand)
            if val < best:
                best, best_free = val, cand
        half *= 2.0 / local
    return best


def oracle_dual(space: FiniteMetricSpace, mu: SignedMeasure, q: float,
                samples: int, seed: int) -> float:
    """Best pairing over random functions on the q-Lipschitz unit sphere.

    Every candidate is rescaled onto the unit sphere before pairing, so
    the result is a valid lower bound on the conjugate norm of mu, never
    an upper bound.
    """
    if mu.space is not space:
        raise ValueError("measure belongs to a different space instance")
    q = check_q(q)
    if samples < 1000:
        raise ValueError("samples must be at least 1000")
    n = space.n
    rng = np.random.default_rng(seed)
    f = rng.uniform(-1.0, 1.0, size=(samples, n))

    if n > 1:
        lips = np.zeros(samples)
        for i in range(n):
            for j in range(i + 1, n):
                np.maximum(lips, np.abs(f[:, i] - f[:, j]) / space.dist[i, j], out=lips)
    else:
        lips = np.zeros(samples)
    sups = np.abs(f).max(axis=1)

    best = 0.0
    pairings = f @ mu.weights
    for k in range(samples):
        norm = lp_combine(lips[k], sups[k], q)
        if norm > 0.0:
            best = max(best, abs(float(pairings[k])) / norm)
    return best
