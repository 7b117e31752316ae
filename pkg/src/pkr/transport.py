"""Exact Kantorovich-Rubinstein transport via a primal network simplex.

The solver works on the bipartite transportation graph between the atoms
of the negative part (sources) and the positive part (sinks) of a
zero-charge measure, rooted at an artificial node for the initial basis.
By the triangle inequality this bipartite problem has the same optimum as
the unrestricted divergence-constrained problem, so no relay or slack
arcs are needed.

Orientation convention, fixed throughout the package: a plan entry
(i, j, m) moves mass m from point i to point j, and divergence adds at j.
Dual node potentials u then satisfy u[j] - u[i] <= d(i, j) everywhere,
with equality on every entry carrying positive mass, and sum(u * xi)
equals the transport cost.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NonZeroCharge, NumericalFailure
from .space import (
    FiniteMetricSpace,
    SignedMeasure,
    _frozen_array,
    support,
    total_charge,
    tv_norm,
)

PERTURBATION_REL = 1e-13
CHARGE_REL_TOL = 1e-9


@dataclass(frozen=True)
class TransportPlan:
    """Sparse nonnegative mass matrix over point pairs of one space."""

    space: FiniteMetricSpace
    entries: tuple[tuple[int, int, float], ...]

    def __post_init__(self):
        n = self.space.n
        clean = []
        for i, j, m in self.entries:
            i, j, m = int(i), int(j), float(m)
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"plan entry ({i}, {j}) outside space of size {n}")
            if not math.isfinite(m) or m < 0.0:
                raise ValueError(f"plan mass must be finite and >= 0, got {m}")
            clean.append((i, j, m))
        object.__setattr__(self, "entries", tuple(clean))

    def __repr__(self) -> str:
        return f"TransportPlan(entries={len(self.entries)}, cost={plan_cost(self.space, self):.6g})"


@dataclass(frozen=True)
class FlowResult:
    """Optimal transport cost, an attaining plan, and dual node potentials."""

    cost: float
    plan: TransportPlan
    potentials: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "potentials", _frozen_array(self.potentials))


def plan_cost(space: FiniteMetricSpace, plan: TransportPlan) -> float:
    """Sum of mass * distance over plan entries."""
    if plan.space is not space:
        raise ValueError("plan belongs to a different space instance")
    d = space.dist
    return float(math.fsum(m * float(d[i, j]) for i, j, m in plan.entries))


def plan_divergence(space: FiniteMetricSpace, plan: TransportPlan) -> SignedMeasure:
    """Incoming minus outgoing mass per point."""
    if plan.space is not space:
        raise ValueError("plan belongs to a different space instance")
    w = np.zeros(space.n)
    for i, j, m in plan.entries:
        w[j] += m
        w[i] -= m
    return SignedMeasure(space, w)


class _TransportationSolver:
    """Primal network simplex for one balanced transportation instance.

    Bland-style anti-cycling pivot: the entering arc is the lowest-index
    arc with negative reduced cost, and ties for the leaving arc break to
    the lowest index. Supplies carry a tiny uniform perturbation against
    degenerate stalls; the perturbation is removed exactly at extraction
    by re-solving the final spanning tree against the unperturbed
    balances.
    """

    def __init__(self, costs: np.ndarray, supplies: np.ndarray, demands: np.ndarray):
        self.costs = np.asarray(costs, dtype=float)
        self.supplies = np.asarray(supplies, dtype=float)
        self.demands = np.asarray(demands, dtype=float)
        self.m, self.n = self.costs.shape
        if self.m != len(self.supplies) or self.n != len(self.demands):
            raise ValueError("cost matrix shape must match supplies x demands")

    def solve(self):
        m, n = self.m, self.n
        num_real = m * n
        num_nodes = m + n + 1
        root = m + n

        total = float(self.supplies.sum())
        eps = PERTURBATION_REL * total
        sup = self.supplies + eps
        dem = self.demands + (m * eps) / n

        cost_scale = max(1.0, float(self.costs.max(initial=0.0)))
        # power of two so +-M cancels exactly in reduced costs
        big_m = 2.0 ** math.ceil(math.log2(8.0 * (m + n + 2) * cost_scale))

        tail = np.empty(num_real + m + n, dtype=np.int64)
        head = np.empty_like(tail)
        cost = np.empty(num_real + m + n, dtype=float)
        k = np.arange(num_real)
        tail[:num_real] = k // n
        head[:num_real] = m + (k % n)
        cost[:num_real] = self.costs.reshape(-1)
        for i in range(m):
            tail[num_real + i] = i
            head[num_real + i] = root
            cost[num_real + i] = big_m
        for j in range(n):
            tail[num_real + m + j] = root
            head[num_real + m + j] = m + j
            cost[num_real + m + j] = big_m

        flow = np.zeros(len(tail))
        in_tree = np.zeros(len(tail), dtype=bool)
        in_tree[num_real:] = True
        flow[num_real:num_real + m] = sup
        flow[num_real + m:] = dem

        parent = np.full(num_nodes, -1, dtype=np.int64)
        parent_arc = np.full(num_nodes, -1, dtype=np.int64)
        u = np.zeros(num_nodes)
        self._rebuild_tree(tail, head, cost, in_tree, parent, parent_arc, u, root)

        pivot_tol = 1e-12 * cost_scale
        max_pivots = 200 * (len(tail) + num_nodes) + 1000
        for _ in range(max_pivots):
            rc = cost + u[tail] - u[head]
            rc[in_tree] = 0.0
            candidates = np.nonzero(rc < -pivot_tol)[0]
            if len(candidates) == 0:
                break
            e = int(candidates[0])
            self._pivot(e, tail, head, flow, in_tree, parent, parent_arc)
            self._rebuild_tree(tail, head, cost, in_tree, parent, parent_arc, u, root)
        else:
            raise NumericalFailure("network simplex pivot cap exceeded")

        # de-perturb: re-solve the optimal tree against unperturbed balances
        balance = np.zeros(num_nodes)
        balance[:m] = -self.supplies
        balance[m:m + n] = self.demands
        balance[root] = -float(balance[:m + n].sum())
        depth = self._depths(parent, root, num_nodes)
        order = sorted((x for x in range(num_nodes) if x != root),
                       key=lambda x: -depth[x])
        resid = balance.copy()
        exact = np.zeros(len(tail))
        for x in order:
            a = int(parent_arc[x])
            p = int(parent[x])
            if tail[a] == x:
                f = -resid[x]
                resid[p] -= f
            else:
                f = resid[x]
                resid[p] += f
            exact[a] = f

        neg_tol = 1e-8 * max(1.0, total)
        if float(exact.min(initial=0.0)) < -neg_tol:
            raise NumericalFailure("negative basic flow after de-perturbation")
        exact = np.maximum(exact, 0.0)
        exact[~in_tree] = 0.0
        if float(exact[num_real:].max(initial=0.0)) > neg_tol:
            raise NumericalFailure("artificial arc carries mass: instance not balanced")

        flows = {}
        for a in range(num_real):
            if exact[a] > 0.0:
                flows[(int(tail[a]), int(head[a]) - m)] = float(exact[a])

        u_src, u_snk = self._dual_potentials(flows)
        return flows, u_src, u_snk

    @staticmethod
    def _depths(parent, root, num_nodes):
        depth = np.zeros(num_nodes, dtype=np.int64)
        for x in range(num_nodes):
            d, y = 0, x
            while y != root:
                y = int(parent[y])
                d += 1
            depth[x] = d
        return depth

    @staticmethod
    def _rebuild_tree(tail, head, cost, in_tree, parent, parent_arc, u, root):
        num_nodes = len(u)
        adj = [[] for _ in range(num_nodes)]
        for a in np.nonzero(in_tree)[0]:
            t, h = int(tail[a]), int(head[a])
            adj[t].append((h, int(a)))
            adj[h].append((t, int(a)))
        parent[:] = -1
        parent_arc[:] = -1
        u[root] = 0.0
        seen = np.zeros(num_nodes, dtype=bool)
        seen[root] = True
        stack = [root]
        while stack:
            x = stack.pop()
            for y, a in adj[x]:
                if seen[y]:
                    continue
                seen[y] = True
                parent[y] = x
                parent_arc[y] = a
                # zero reduced cost on tree arcs: u[head] = u[tail] + cost
                if int(tail[a]) == x:
                    u[y] = u[x] + cost[a]
                else:
                    u[y] = u[x] - cost[a]
                stack.append(y)
        if not seen.all():
            raise NumericalFailure("basis lost spanning-tree property")

    def _pivot(self, e, tail, head, flow, in_tree, parent, parent_arc):
        te, he = int(tail[e]), int(head[e])
        root = len(parent) - 1
        depth = self._depths(parent, root, len(parent))

        fwd_side = []   # arcs traversed child->parent starting at he
        bwd_side = []   # arcs traversed parent->child (collected climbing from te)
        x, y = he, te
        while x != y:
            if depth[x] >= depth[y]:
                a = int(parent_arc[x])
                fwd_side.append((a, int(tail[a]) == x))
                x = int(parent[x])
            else:
                a = int(parent_arc[y])
                bwd_side.append((a, int(head[a]) == y))
                y = int(parent[y])

        cycle = [(e, True)] + fwd_side + bwd_side
        theta = math.inf
        leaving = -1
        for a, forward in cycle:
            if not forward and (flow[a] < theta or (flow[a] == theta and a < leaving)):
                theta = float(flow[a])
                leaving = a
        if leaving < 0:
            raise NumericalFailure("unbounded pivot cycle")

        for a, forward in cycle:
            flow[a] += theta if forward else -theta
        flow[leaving] = 0.0
        in_tree[leaving] = False
        in_tree[e] = True

    def _dual_potentials(self, flows):
        """Feasible, complementary-slack duals via Bellman-Ford relaxation.

        The big-M tree potentials are unusable whenever artificial arcs
        stay basic at degenerate zero flow, so the duals are rebuilt from
        the optimal flow alone: edge (i -> j) with weight c enforces
        u_snk[j] <= u_src[i] + c, and the reverse edge with weight -c on
        every support pair forces equality there.
        """
        m, n = self.m, self.n
        num = m + n
        edges = []
        for i in range(m):
            for j in range(n):
                edges.append((i, m + j, float(self.costs[i, j])))
        for (i, j), f in sorted(flows.items()):
            edges.append((m + j, i, -float(self.costs[i, j])))

        scale = max(1.0, float(self.costs.max(initial=0.0)))
        tol_relax = 1e-13 * scale
        u = np.zeros(num)
        for _ in range(num + 1):
            changed = False
            for t, h, w in edges:
                v = u[t] + w
                if v < u[h] - tol_relax:
                    u[h] = v
                    changed = True
            if not changed:
                break
        worst = min((u[t] + w - u[h] for t, h, w in edges), default=0.0)
        if worst < -1e-6 * scale:
            raise NumericalFailure("dual extraction found a negative cycle")
        return u[:m].copy(), u[m:].copy()


def solve_transportation(costs, supplies, demands):
    """Balanced transportation problem; returns (flows, u_src, u_snk).

    ``flows`` maps (source row, sink column) to positive mass; the duals
    satisfy u_snk[j] - u_src[i] <= costs[i, j] with equality on flows.
    """
    return _TransportationSolver(np.asarray(costs, dtype=float),
                                 np.asarray(supplies, dtype=float),
                                 np.asarray(demands, dtype=float)).solve()


def extend_potentials(dist: np.ndarray, src_indices, u_src) -> np.ndarray:
    """McShane extension of source potentials to every point.

    f(x) = min_i (u_src[i] + d(x, src_i)) is 1-Lipschitz for the metric
    and agrees with the optimal duals on every atom that carries flow, so
    it preserves complementary slackness and strong duality.
    """
    n = dist.shape[0]
    if len(src_indices) == 0:
        return np.zeros(n)
    cols = dist[:, list(src_indices)] + np.asarray(u_src, dtype=float)[None, :]
    return cols.min(axis=1)


def kr_norm(space: FiniteMetricSpace, xi: SignedMeasure) -> FlowResult:
    """Kantorovich-Rubinstein norm of a zero-charge measure.

    Returns the exact minimum of sum(d * plan) over plans whose divergence
    is ``xi``, an attaining plan, and 1-Lipschitz node potentials with
    sum(potentials * xi) equal to the cost. Potentials are shifted so the
    lowest-index support point sits at 0.
    """
    if xi.space is not space:
        raise ValueError("measure belongs to a different space instance")
    w = xi.weights
    tv = tv_norm(xi)
    if abs(total_charge(xi)) > CHARGE_REL_TOL * max(1.0, tv):
        raise NonZeroCharge(f"total charge {total_charge(xi)} != 0")

    src_idx = [i for i in range(space.n) if w[i] < 0.0]
    snk_idx = [j for j in range(space.n) if w[j] > 0.0]
    if not src_idx or not snk_idx:
        return FlowResult(0.0, TransportPlan(space, ()), np.zeros(space.n))

    supplies = np.array([-w[i] for i in src_idx])
    demands = np.array([w[j] for j in snk_idx])
    demands *= float(supplies.sum()) / float(demands.sum())
    costs = space.dist[np.ix_(src_idx, snk_idx)]

    flows, u_src, u_snk = solve_transportation(costs, supplies, demands)

    entries = sorted((src_idx[i], snk_idx[j], f) for (i, j), f in flows.items())
    plan = TransportPlan(space, tuple(entries))
    cost = plan_cost(space, plan)

    pot = extend_potentials(space.dist, src_idx, u_src)
    sup = support(xi)
    if sup:
        pot = pot - pot[sup[0]]
    return FlowResult(cost, plan, pot)
