"""Exact Wasserstein-1 solvers on the support bipartite graph.

Couplings only place mass on support pairs, so both the primal
transportation problem and its Lipschitz-potential dual are solved over
the supports with costs pulled from the graph metric, never over all of V.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import Unbalanced
from .lp import solve_lp

# centralized tolerances
MASS_TOL = 1e-12      # balance of input masses
FEASIBILITY_TOL = 1e-10  # plan marginals vs. inputs
DUALITY_GAP_TOL = 1e-7   # asserted primal-dual agreement


@dataclass(frozen=True)
class TransportProblem:
    """Balanced mass-moving instance over two vertex supports.

    sources/sinks: tuples of (vertex, mass); cost: matrix indexed by
    (source position, sink position), typically distances.
    """

    sources: tuple
    sinks: tuple
    cost: np.ndarray

    @classmethod
    def between_measures(cls, mu1, mu2, dist):
        """Instance for W1(mu1, mu2) with costs from a DistanceMatrix."""
        src = tuple(sorted((v, m) for v, m in mu1.items() if m > 0))
        snk = tuple(sorted((v, m) for v, m in mu2.items() if m > 0))
        cost = np.array([[dist.d(u, v) for v, _ in snk] for u, _ in src])
        return cls(src, snk, cost)

    def validate(self):
        s1 = sum(m for _, m in self.sources)
        s2 = sum(m for _, m in self.sinks)
        if abs(s1 - s2) > FEASIBILITY_TOL:
            raise Unbalanced(f"source mass {s1!r} vs sink mass {s2!r}")
        if abs(s1 - 1.0) > 1e-9:
            raise Unbalanced(f"masses must form a probability distribution, sum {s1!r}")
        for _, m in self.sources + self.sinks:
            if m < 0:
                raise Unbalanced(f"negative mass {m!r}")
        if not np.isfinite(self.cost).all():
            raise ValueError("non-finite transport costs")


@dataclass(frozen=True)
class TransportPlan:
    """Optimal coupling: entries aligned with the problem's supports."""

    problem: TransportProblem
    coupling: np.ndarray
    cost: float

    def marginal_error(self):
        row = self.coupling.sum(axis=1) - np.array([m for _, m in self.problem.sources])
        col = self.coupling.sum(axis=0) - np.array([m for _, m in self.problem.sinks])
        return max(np.abs(row).max(), np.abs(col).max())


def min_cost_transport(p):
    """Exact optimal coupling via the dense transportation LP."""
    p.validate()
    ns, nt = len(p.sources), len(p.sinks)
    c = p.cost.reshape(-1)
    # marginal equalities; one row is redundant but phase 1 handles that
    a_eq = np.zeros((ns + nt, ns * nt))
    b_eq = np.zeros(ns + nt)
    for i in range(ns):
        a_eq[i, i * nt:(i + 1) * nt] = 1.0
        b_eq[i] = p.sources[i][1]
    for j in range(nt):
        a_eq[ns + j, j::nt] = 1.0
        b_eq[ns + j] = p.sinks[j][1]
    opt, x = solve_lp(c, a_eq=a_eq, b_eq=b_eq, nonneg=True)
    plan = TransportPlan(p, x.reshape(ns, nt), opt)
    assert plan.marginal_error() <= FEASIBILITY_TOL
    return plan


def w1_dual(p, dist=None):
    """Kantorovich dual: sup over 1-Lipschitz potentials f of sum f d(mu1-mu2).

    If `dist` is given, Lipschitz constraints are taken pairwise over the
    joint support under the full metric; otherwise the problem's cost
    matrix provides the only (source, sink) constraints, which is valid
    when the cost is itself a metric restriction.
    """
    p.validate()
    support = sorted({v for v, _ in p.sources} | {v for v, _ in p.sinks})
    index = {v: i for i, v in enumerate(support)}
    n = len(support)
    net = np.zeros(n)
    for v, m in p.sources:
        net[index[v]] += m
    for v, m in p.sinks:
        net[index[v]] -= m

    rows, bounds = [], []

    def lip(i, j, d):
        row = np.zeros(n)
        row[i], row[j] = 1.0, -1.0
        rows.append(row.copy()); bounds.append(d)
        rows.append(-row); bounds.append(d)

    if dist is not None:
        for a in range(n):
            for b in range(a + 1, n):
                lip(a, b, dist.d(support[a], support[b]))
    else:
        for i, (u, _) in enumerate(p.sources):
            for j, (v, _) in enumerate(p.sinks):
                if u != v:
                    lip(index[u], index[v], p.cost[i, j])

    # gauge: potentials are translation invariant, pin the first one
    a_eq = np.zeros((1, n))
    a_eq[0, 0] = 1.0
    opt, _ = solve_lp(-net, np.array(rows), np.array(bounds), a_eq, np.zeros(1))
    return -opt
