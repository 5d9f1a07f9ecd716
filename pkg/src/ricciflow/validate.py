"""Self-contained oracle suite behind the `validate` CLI subcommand.

Each check pits a general-purpose computation against an independent
oracle (closed form, brute force, or dual bound) and reports pass/fail;
the pytest acceptance suite runs the full-strength versions, this one is
sized for an interactive sanity run.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import oracles
from .curvature import (Gamma, alpha_ricci, curvature_bounds, edge_curvatures,
                        lly_curvature_lp, lly_curvature_extrapolated)
from .flow import FlowConfig, integrate
from .graph import WeightedGraph, all_pairs_distances
from .surgery import communities, run_flow_with_surgery
from .transport import TransportProblem, min_cost_transport, w1_dual


@dataclass(frozen=True)
class CheckResult:
    group: str
    name: str
    passed: bool
    detail: str


def _random_connected_graph(rng, n):
    """Random tree plus extra edges, weights in (0.05, 1], metric-repaired.

    The repair replaces each weight by the graph distance between its
    endpoints; distances are unchanged and every edge then realizes its
    distance, so curvature is defined on all edges.
    """
    edges = []
    for v in range(1, n):
        u = int(rng.integers(0, v))
        edges.append((u, v, float(rng.uniform(0.05, 1.0))))
    extra = int(rng.integers(0, n))
    for _ in range(extra):
        u, v = rng.choice(n, size=2, replace=False)
        if not any(set(e[:2]) == {int(u), int(v)} for e in edges):
            edges.append((int(u), int(v), float(rng.uniform(0.05, 1.0))))
    g = WeightedGraph(edges)
    dist = all_pairs_distances(g)
    return WeightedGraph([(u, v, dist.d(u, v)) for u, v, _ in edges])


def _check_transport(rng):
    worst_primal, worst_gap = 0.0, 0.0
    for _ in range(40):
        g = _random_connected_graph(rng, int(rng.integers(3, 7)))
        dist = all_pairs_distances(g)
        verts = list(g.vertices)
        m, n = int(rng.integers(1, 5)), int(rng.integers(1, 5))
        src = rng.choice(verts, size=min(m, len(verts)), replace=False)
        snk = rng.choice(verts, size=min(n, len(verts)), replace=False)
        sm = rng.random(len(src)) + 0.05
        dm = rng.random(len(snk)) + 0.05
        sm /= sm.sum()
        dm /= dm.sum()
        p = TransportProblem(
            tuple((int(v), float(x)) for v, x in zip(src, sm)),
            tuple((int(v), float(x)) for v, x in zip(snk, dm)),
            np.array([[dist.d(int(a), int(b)) for b in snk] for a in src]),
        )
        plan = min_cost_transport(p)
        worst_primal = max(worst_primal,
                           abs(plan.cost - oracles.transport_bruteforce(p)))
        worst_gap = max(worst_gap, abs(plan.cost - w1_dual(p, dist)))
    yield CheckResult("transport", "primal vs brute force",
                      worst_primal <= 1e-10, f"max gap {worst_primal:.2e}")
    yield CheckResult("transport", "primal-dual gap",
                      worst_gap <= 1e-7, f"max gap {worst_gap:.2e}")


def _check_curvature(rng):
    g2 = WeightedGraph([(0, 1, 0.3), (1, 2, 0.7)])
    kap = edge_curvatures(g2, Gamma.reciprocal())
    yield CheckResult("curvature", "two-edge path, reciprocal",
                      np.abs(kap - 1.0).max() <= 1e-9,
                      f"max |kappa-1| {np.abs(kap - 1).max():.2e}")

    k2 = WeightedGraph([(0, 1, 1.0)])
    v = lly_curvature_lp(k2, Gamma.reciprocal(), (0, 1))
    yield CheckResult("curvature", "single edge", abs(v - 2.0) <= 1e-12,
                      f"kappa {v:.12g}")

    worst = 0.0
    for _ in range(10):
        w = rng.uniform(0.05, 1.0, 6)
        g = WeightedGraph([(i, i + 1, wi) for i, wi in enumerate(w)])
        kap = edge_curvatures(g, Gamma.reciprocal())
        worst = max(worst, np.abs(
            kap - oracles.path_curvature_expected(6, w)).max())
    yield CheckResult("curvature", "path closed form", worst <= 1e-9,
                      f"max err {worst:.2e}")

    worst = 0.0
    for _ in range(10):
        d = int(rng.integers(3, 7))
        w = rng.uniform(0.05, 1.0, d)
        w /= w.sum()
        g = WeightedGraph([(0, i + 1, wi) for i, wi in enumerate(w)])
        exp, _, _ = oracles.star_expected(d, w)
        worst = max(worst, np.abs(
            edge_curvatures(g, Gamma.reciprocal()) - exp).max())
    yield CheckResult("curvature", "star closed form", worst <= 1e-9,
                      f"max err {worst:.2e}")

    ok = True
    detail = "all edges inside certified bounds"
    for _ in range(10):
        g = _random_connected_graph(rng, int(rng.integers(4, 9)))
        dist = all_pairs_distances(g)
        for e in g.edge_list:
            kap = lly_curvature_lp(g, Gamma.reciprocal(), e, dist)
            b = curvature_bounds(g, Gamma.reciprocal(), e, dist)
            if not (b.lower - 1e-9 <= kap <= b.upper + 1e-9):
                ok = False
                detail = f"edge {e}: kappa {kap:.6g} outside [{b.lower:.6g}, {b.upper:.6g}]"
    yield CheckResult("curvature", "bound certificates", ok, detail)


def _check_limit(rng):
    worst = 0.0
    grid = (0.95, 0.96, 0.97, 0.98, 0.99)
    for _ in range(8):
        g = _random_connected_graph(rng, int(rng.integers(3, 7)))
        dist = all_pairs_distances(g)
        for e in g.edge_list:
            lp = lly_curvature_lp(g, Gamma.reciprocal(), e, dist)
            ext = lly_curvature_extrapolated(g, Gamma.reciprocal(), e, grid,
                                             dist, residual_tol=1e-2)
            worst = max(worst, abs(lp - ext))
    yield CheckResult("limit", "extrapolation vs LP", worst <= 1e-5,
                      f"max err {worst:.2e}")

    g = WeightedGraph([(0, 1, 0.3), (1, 2, 0.7)])
    v = alpha_ricci(g, Gamma.reciprocal(), (0, 1), 0.9) / 0.1
    yield CheckResult("limit", "idleness consistency", abs(v - 1.0) <= 0.05,
                      f"kappa_alpha/(1-alpha) {v:.6g}")


def _check_flow(rng):
    g = WeightedGraph([(0, 1, 0.3), (1, 2, 0.7)])
    cfg = FlowConfig(gamma=Gamma.reciprocal(), integrator="rk4", h=1e-2,
                     horizon=2.0, conv_tol=0.0)
    traj = integrate(g, cfg)
    drift = np.abs(traj.weights - traj.weights[0]).max()
    yield CheckResult("flow", "constant regime", drift <= 1e-8,
                      f"max drift {drift:.2e}")

    g = WeightedGraph([(0, 1, 0.2), (1, 2, 0.8)])
    cfg = FlowConfig(gamma=Gamma.identity(), integrator="rk45", horizon=1.0,
                     conv_tol=0.0, rtol=1e-10, atol=1e-13)
    traj = integrate(g, cfg)
    err = abs(traj.weights[-1][0] - (0.5 - 0.3 * np.exp(-2.0)))
    yield CheckResult("flow", "stable regime t=1", err <= 1e-6,
                      f"err {err:.2e}")

    g = WeightedGraph([(0, 1, 0.6), (1, 2, 0.4)])
    cfg = FlowConfig(gamma=Gamma.reciprocal_square(), integrator="rk45",
                     horizon=20.0, mt=1e-3, conv_tol=0.0)
    traj = integrate(g, cfg)
    # the curvature of the edge collapsing to a point tends to 2
    j = traj.edges.index(traj.event[1]) if traj.event else 0
    ok = (traj.stop_reason == "event" and traj.event[0] == "contract"
          and abs(traj.kappas[-1][j] - 2.0) <= 1e-3)
    yield CheckResult("flow", "collapsing regime event", ok,
                      f"stop {traj.stop_reason}, kappa at contraction "
                      f"{traj.kappas[-1][j]:.6g}")

    g = WeightedGraph([(0, i, wi) for i, wi in
                       zip((1, 2, 3), (0.5, 0.3, 0.2))])
    cfg = FlowConfig(gamma=Gamma.reciprocal(), integrator="rk45",
                     horizon=10.0, conv_tol=0.0)
    traj = integrate(g, cfg)
    drift = np.abs(traj.weights.sum(axis=1) - 1.0).max()
    yield CheckResult("flow", "conservation to t=10", drift <= 1e-8,
                      f"max |sum w - 1| {drift:.2e}")


def _check_surgery(rng):
    w = rng.uniform(0.2, 1.0, 6)
    w /= w.sum()
    g = WeightedGraph([(i, i + 1, wi) for i, wi in enumerate(w)])
    cfg = FlowConfig(gamma=Gamma.reciprocal(), integrator="rk45",
                     horizon=100.0, mt=1e-3, renormalize=True,
                     conserve_total=True, conv_tol=1e-11)
    res = run_flow_with_surgery(g, cfg)
    ok = (res.graph.num_edges == 2
          and all(e.kind == "contract" for e in res.events))
    yield CheckResult("surgery", "path reduces to two edges", ok,
                      f"final edges {res.graph.edge_list}")

    g = WeightedGraph([(0, i, wi) for i, wi in
                       zip((1, 2, 3, 4), (0.4, 0.3, 0.2, 0.1))])
    cfg = FlowConfig(gamma=Gamma.reciprocal(), integrator="rk45",
                     horizon=100.0, mt=1e-3, conserve_total=True,
                     conv_tol=1e-11)
    res = run_flow_with_surgery(g, cfg)
    err = np.abs(res.graph.weight_vector() - 0.25).max()
    ok = not res.events and err <= 1e-5 and len(communities(res)) == 5
    yield CheckResult("surgery", "star fixed point, no surgery", ok,
                      f"max |w - 1/4| {err:.2e}, {len(res.events)} events")


GROUPS = {
    "transport": _check_transport,
    "curvature": _check_curvature,
    "limit": _check_limit,
    "flow": _check_flow,
    "surgery": _check_surgery,
}


def run_suite(filter_group=None, seed=0):
    """Run (a filtered subset of) the oracle suite; returns CheckResults."""
    if filter_group is not None and filter_group not in GROUPS:
        raise ValueError(f"unknown group {filter_group!r}; "
                         f"choose from {sorted(GROUPS)}")
    rng = np.random.default_rng(seed)
    results = []
    for group, fn in GROUPS.items():
        if filter_group is not None and group != filter_group:
            continue
        results.extend(fn(rng))
    return results
