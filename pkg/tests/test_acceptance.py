"""Acceptance suite: one test per criterion, one pass/fail line each under
`pytest -v`. Every expected value comes from an independent oracle (closed
form, brute force, or dual bound), never from the code under test.
"""

import numpy as np
import pytest

from conftest import path_graph, random_connected_graph, star_graph
from ricciflow import (FlowConfig, Gamma, WeightedGraph, all_pairs_distances,
                       alpha_ricci, curvature_bounds, edge_curvatures,
                       integrate, lly_curvature_extrapolated,
                       lly_curvature_lp, min_cost_transport,
                       run_flow_with_surgery, w1_dual, TransportProblem)
from ricciflow.flow import rhs_normalized
from ricciflow.oracles import (UNNORMALIZED_PATH2_MATRIX,
                               path_curvature_expected, star_expected,
                               transport_bruteforce,
                               unnormalized_path2_solution)


def _report(n, detail):
    print(f"[criterion {n:2d}] PASS — {detail}")


def test_criterion_01_constant_regime():
    """Path-2, reciprocal gamma, RK4 h=1e-3 over [0,10]: weights frozen."""
    g = path_graph([0.3, 0.7])
    cfg = FlowConfig(gamma=Gamma.reciprocal(), integrator="rk4", h=1e-3,
                     horizon=10.0, conv_tol=0.0)
    traj = integrate(g, cfg)
    assert traj.times[-1] == pytest.approx(10.0, abs=1e-9)
    drift = np.abs(traj.weights - np.array([0.3, 0.7])).max()
    kappa_err = np.abs(traj.kappas - 1.0).max()
    assert drift <= 1e-8
    assert kappa_err <= 1e-9
    _report(1, f"max drift {drift:.2e}, max |kappa-1| {kappa_err:.2e}")


def test_criterion_02_stable_regime():
    """Path-2, identity gamma: matches 1/2 - 0.3 exp(-2t) within 1e-6."""
    worst = 0.0
    for t in (0.5, 1.0, 2.0, 5.0):
        g = path_graph([0.2, 0.8])
        cfg = FlowConfig(gamma=Gamma.identity(), integrator="rk45",
                         horizon=t, conv_tol=0.0, rtol=1e-10, atol=1e-13)
        traj = integrate(g, cfg)
        assert traj.times[-1] == pytest.approx(t, abs=1e-9)
        worst = max(worst,
                    abs(traj.weights[-1][0] - (0.5 - 0.3 * np.exp(-2 * t))))
    assert worst <= 1e-6
    _report(2, f"max closed-form error {worst:.2e} at t in {{0.5,1,2,5}}")


def test_criterion_03_collapsing_regime():
    """Path-2, reciprocal-square gamma: monotone collapse, contract event,
    curvature of the collapsing edge within 1e-3 of 2."""
    g = path_graph([0.6, 0.4])
    cfg = FlowConfig(gamma=Gamma.reciprocal_square(), integrator="rk45",
                     horizon=50.0, mt=1e-3, conv_tol=0.0)
    traj = integrate(g, cfg)
    assert traj.stop_reason == "event"
    assert traj.event == ("contract", (1, 2))
    w_yz = traj.weights[:, 1]
    assert (np.diff(w_yz) < 0).all()
    assert w_yz[-1] < 1e-3
    kappa_evt = traj.kappas[-1][1]
    assert kappa_evt == pytest.approx(2.0, abs=1e-3)
    _report(3, f"contract at t={traj.times[-1]:.3f}, "
               f"kappa {kappa_evt:.6f}")


def test_criterion_04_path_curvature_and_full_run(rng):
    """n=6 path: LP curvature is the 1/0/0/0/0/1 pattern for 10 random
    weight vectors; the full surgery run ends at a stationary path-2."""
    worst = 0.0
    for _ in range(10):
        w = rng.uniform(0.05, 1.0, 6)
        g = path_graph(w)
        worst = max(worst, np.abs(
            edge_curvatures(g, Gamma.reciprocal())
            - path_curvature_expected(6, w)).max())
    assert worst <= 1e-9

    w = rng.uniform(0.2, 1.0, 6)
    w /= w.sum()
    cfg = FlowConfig(gamma=Gamma.reciprocal(), integrator="rk45",
                     horizon=100.0, mt=1e-3, renormalize=True,
                     conserve_total=True, conv_tol=1e-11)
    res = run_flow_with_surgery(path_graph(w), cfg)
    assert res.graph.num_edges == 2
    rate = np.abs(rhs_normalized(res.graph, Gamma.reciprocal(),
                                 res.graph.weight_vector())).max()
    assert rate < 1e-10
    _report(4, f"max kappa error {worst:.2e}; final minor "
               f"{res.graph.edge_list} with max|dw/dt| {rate:.2e}")


def test_criterion_05_star_convergence(rng):
    """Stars d in {3,5,8}, 5 random starts each: weights reach 1/d by t=50,
    drift signs never flip, closed-form kappa matches the LP everywhere."""
    worst_w, worst_k = 0.0, 0.0
    for d in (3, 5, 8):
        for _ in range(5):
            w0 = rng.uniform(0.05, 1.0, d)
            w0 /= w0.sum()
            g = star_graph(w0)
            cfg = FlowConfig(gamma=Gamma.reciprocal(), integrator="rk45",
                             horizon=50.0, conv_tol=0.0, conserve_total=True)
            traj = integrate(g, cfg)
            worst_w = max(worst_w,
                          np.abs(traj.weights[-1] - 1.0 / d).max())
            # kappa closed form at every sample
            for w_row, k_row in zip(traj.weights, traj.kappas):
                exp_k, _, _ = star_expected(d, w_row)
                worst_k = max(worst_k, np.abs(k_row - exp_k).max())
            # F sign preservation: no strict sign flip along the trajectory
            drifts = traj.drifts()
            f0 = drifts[0]
            for f_row in drifts:
                flip = ((f0 > 1e-10) & (f_row < -1e-10)) | \
                       ((f0 < -1e-10) & (f_row > 1e-10))
                assert not flip.any()
    assert worst_w <= 1e-5
    assert worst_k <= 1e-9
    _report(5, f"max |w - 1/d| {worst_w:.2e} at t=50, "
               f"max kappa error {worst_k:.2e}, drift signs preserved")


def test_criterion_06_unnormalized_collapse():
    """Equal-weight path-2, unnormalized: w(0) e^{-t}; eigenvalues -1, -2."""
    worst = 0.0
    for t in (1.0, 2.0):
        g = path_graph([0.5, 0.5])
        cfg = FlowConfig(mode="unnormalized", gamma=Gamma.reciprocal(),
                         integrator="rk45", horizon=t, conv_tol=0.0,
                         mt=1e-9, rtol=1e-10, atol=1e-13)
        traj = integrate(g, cfg)
        ref = unnormalized_path2_solution((0.5, 0.5), t)
        worst = max(worst, np.abs(traj.weights[-1] - np.array(ref)).max())
    assert worst <= 1e-6
    eig = np.sort(np.linalg.eigvalsh(UNNORMALIZED_PATH2_MATRIX))
    eig_err = np.abs(eig - np.array([-2.0, -1.0])).max()
    assert eig_err <= 1e-12
    _report(6, f"max decay error {worst:.2e}, eigenvalue error {eig_err:.2e}")


def test_criterion_07_transport(rng):
    """200 random transport problems: primal equals brute force exactly and
    the dual gap stays below 1e-7."""
    worst_primal, worst_gap = 0.0, 0.0
    for _ in range(200):
        g = random_connected_graph(rng, int(rng.integers(3, 7)))
        dist = all_pairs_distances(g)
        verts = list(g.vertices)
        src = rng.choice(verts, size=min(int(rng.integers(1, 5)), len(verts)),
                         replace=False)
        snk = rng.choice(verts, size=min(int(rng.integers(1, 5)), len(verts)),
                         replace=False)
        sm = rng.random(len(src)) + 0.05
        dm = rng.random(len(snk)) + 0.05
        sm /= sm.sum()
        dm /= dm.sum()
        p = TransportProblem(
            tuple((int(v), float(x)) for v, x in zip(src, sm)),
            tuple((int(v), float(x)) for v, x in zip(snk, dm)),
            np.array([[dist.d(int(a), int(b)) for b in snk] for a in src]))
        plan = min_cost_transport(p)
        worst_primal = max(worst_primal,
                           abs(plan.cost - transport_bruteforce(p)))
        worst_gap = max(worst_gap, abs(plan.cost - w1_dual(p, dist)))
    assert worst_primal <= 1e-10
    assert worst_gap <= 1e-7
    _report(7, f"200 instances: primal-bruteforce gap {worst_primal:.2e}, "
               f"dual gap {worst_gap:.2e}")


def test_criterion_08_curvature_bounds(rng):
    """50 random graphs: -2 D(G)/d(u,v) <= kappa <= 2, with the coupling
    certificate below kappa."""
    edges_checked = 0
    for _ in range(50):
        g = random_connected_graph(rng, int(rng.integers(4, 11)))
        dist = all_pairs_distances(g)
        for e in g.edge_list:
            kappa = lly_curvature_lp(g, Gamma.reciprocal(), e, dist)
            b = curvature_bounds(g, Gamma.reciprocal(), e, dist)
            assert b.generic_lower - 1e-9 <= kappa <= 2.0 + 1e-9
            assert b.coupling_lower <= kappa + 1e-9
            edges_checked += 1
    _report(8, f"{edges_checked} edges inside certified bounds")


def test_criterion_09_conservation_and_bijection():
    """Star: total weight conserved to 1e-8 up to t=10 with no projection;
    rescaled unnormalized solutions equal the normalized ones."""
    g = star_graph([0.5, 0.3, 0.2])
    cfg = FlowConfig(gamma=Gamma.reciprocal(), integrator="rk45",
                     horizon=10.0, conv_tol=0.0)
    traj = integrate(g, cfg)
    drift = np.abs(traj.weights.sum(axis=1) - 1.0).max()
    assert drift <= 1e-8

    worst = 0.0
    for t in (1.0, 5.0, 10.0):
        norm = integrate(g, FlowConfig(
            gamma=Gamma.reciprocal(), integrator="rk45", horizon=t,
            conv_tol=0.0)).weights[-1]
        un = integrate(g, FlowConfig(
            mode="unnormalized", gamma=Gamma.reciprocal(), integrator="rk45",
            horizon=t, conv_tol=0.0, mt=1e-9)).weights[-1]
        worst = max(worst, np.abs(un / un.sum() - norm).max())
    assert worst <= 1e-5
    _report(9, f"max |sum w - 1| {drift:.2e} to t=10; "
               f"bijection error {worst:.2e}")


def _linear_pieces(values, tol):
    """Number of linear pieces of values sampled on a uniform grid, read off
    the nonzero second differences."""
    second = np.abs(np.diff(values, 2))
    return 1 + int((second > tol).sum())


def test_criterion_10_limit_consistency(rng):
    """Idleness extrapolation agrees with the LP; unit-weight idleness
    curves are piecewise linear with at most 3 pieces."""
    grid = (0.95, 0.96, 0.97, 0.98, 0.99)
    worst = 0.0
    for _ in range(20):
        g = random_connected_graph(rng, int(rng.integers(3, 9)))
        dist = all_pairs_distances(g)
        for e in g.edge_list:
            lp = lly_curvature_lp(g, Gamma.reciprocal(), e, dist)
            ext = lly_curvature_extrapolated(g, Gamma.reciprocal(), e, grid,
                                             dist, residual_tol=1e-2)
            worst = max(worst, abs(ext - lp))
    assert worst <= 1e-5

    max_pieces = 1
    alphas = np.linspace(0.0, 1.0, 21)
    for _ in range(5):
        base = random_connected_graph(rng, int(rng.integers(3, 9)),
                                      metric_repair=False)
        g = WeightedGraph([(u, v, 1.0) for u, v in base.edge_list])
        dist = all_pairs_distances(g)
        for e in g.edge_list:
            vals = np.array([alpha_ricci(g, Gamma.identity(), e, a, dist)
                             for a in alphas])
            pieces = _linear_pieces(vals, 1e-9)
            max_pieces = max(max_pieces, pieces)
            assert pieces <= 3
    _report(10, f"max extrapolation error {worst:.2e}; "
                f"max {max_pieces} linear pieces on unit weights")
