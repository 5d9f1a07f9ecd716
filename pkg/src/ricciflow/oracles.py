"""Closed-form solutions and brute-force solvers used as independent oracles.

Nothing in the main computation path imports this module; it exists so that
curvature, transport, and flow results can be checked against derivations
that share no code with the general-purpose solvers.
"""

from __future__ import annotations

import itertools

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DegreeTooSmall, RegimeMismatch, SupportTooLarge

REGIMES = ("constant", "stable", "collapsing")
# regime <-> reweighting: constant uses 1/x, stable x, collapsing 1/x**2
REGIME_EXPONENT = {"constant": -1.0, "stable": 1.0, "collapsing": -2.0}


def _check_w0(w0):
    w_xz, w_yz = float(w0[0]), float(w0[1])
    if w_xz <= 0 or w_yz <= 0:
        raise RegimeMismatch(f"weights must be positive, got {w0}")
    if abs(w_xz + w_yz - 1.0) > 1e-9:
        raise RegimeMismatch(f"two-edge path weights must sum to 1, got {w0}")
    return w_xz, w_yz


def path2_kappa(regime, w):
    """Two-edge path curvatures (kappa_xz, kappa_yz) from the closed form
    kappa_xz = 1 + a_x - a_y * w_yz / w_xz with the regime's mixing weight
    a_x = gamma(w_xz) / (gamma(w_xz) + gamma(w_yz))."""
    if regime not in REGIMES:
        raise ValueError(f"unknown regime {regime!r}")
    p = REGIME_EXPONENT[regime]
    w_xz, w_yz = float(w[0]), float(w[1])
    a_x = w_xz ** p / (w_xz ** p + w_yz ** p)
    a_y = 1.0 - a_x
    return np.array([
        1.0 + a_x - a_y * w_yz / w_xz,
        1.0 + a_y - a_x * w_xz / w_yz,
    ])


def path2_solution(regime, w0, t):
    """Normalized-flow state of the two-edge path at time t.

    Constant and stable regimes use the explicit solutions; the collapsing
    regime has no published closed form, so the reference is an independent
    high-accuracy integration of the reduced one-dimensional equation.
    """
    if regime not in REGIMES:
        raise ValueError(f"unknown regime {regime!r}")
    if t < 0:
        raise ValueError("t must be nonnegative")
    w_xz, w_yz = _check_w0(w0)
    if regime == "constant":
        return (w_xz, w_yz)
    if regime == "stable":
        a = 0.5 - (0.5 - w_xz) * np.exp(-2.0 * t)
        return (float(a), float(1.0 - a))
    if t == 0.0:
        return (w_xz, w_yz)

    def rhs(_, y):
        w = np.array([y[0], 1.0 - y[0]])
        kappa = path2_kappa("collapsing", w)
        return [-kappa[0] * w[0] + w[0] * float(kappa @ w)]

    sol = solve_ivp(rhs, (0.0, t), [w_xz], method="DOP853",
                    rtol=1e-10, atol=1e-13, dense_output=False)
    assert sol.success, sol.message
    a = float(sol.y[0, -1])
    return (a, 1.0 - a)


# balance matrix of the unnormalized two-edge path in the a_x = a_y = 1/2
# regime: w' = M w with eigenpairs (-1, (1,1)) and (-2, (1,-1))
UNNORMALIZED_PATH2_MATRIX = np.array([[-1.5, 0.5], [0.5, -1.5]])


def unnormalized_path2_solution(w0, t):
    """Unnormalized flow on the two-edge path with equal initial weights.

    Equal weights put the system on the slow eigenvector of the linear
    system, where both weights decay as exp(-t); unequal weights excite the
    second mode and fall outside this closed form.
    """
    w_xz, w_yz = float(w0[0]), float(w0[1])
    if w_xz <= 0 or w_yz <= 0:
        raise RegimeMismatch(f"weights must be positive, got {w0}")
    if abs(w_xz - w_yz) > 1e-12:
        raise RegimeMismatch(
            f"closed form requires equal initial weights, got {w0}"
        )
    if t < 0:
        raise ValueError("t must be nonnegative")
    decay = float(np.exp(-t))
    return (w_xz * decay, w_yz * decay)


def path_curvature_expected(n, weights):
    """Per-edge curvature of an n-edge path under the reciprocal reweighting:
    1 on the two leaf edges, 0 on every interior edge, for any weights."""
    weights = np.asarray(weights, dtype=float)
    if n < 2:
        raise ValueError("paths here have at least two edges")
    if weights.shape != (n,):
        raise ValueError(f"expected {n} weights, got {weights.shape}")
    if (weights <= 0).any():
        raise ValueError("weights must be positive")
    kappa = np.zeros(n)
    kappa[0] = kappa[-1] = 1.0
    return kappa


def star_expected(d_u, weights):
    """Star-graph closed forms under the reciprocal reweighting.

    Returns (per-edge kappa, per-edge drift F, fixed-point weight). The
    drift formula assumes the weights form a probability vector, which is
    how the normalized flow uses it.
    """
    if d_u < 3:
        raise DegreeTooSmall(f"star results need degree >= 3, got {d_u}")
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (d_u,):
        raise ValueError(f"expected {d_u} weights, got {weights.shape}")
    if (weights <= 0).any():
        raise ValueError("weights must be positive")
    big_d = float(np.sum(1.0 / weights))
    kappa = 1.0 + (2.0 - d_u) / (weights * big_d)
    drift = (d_u - 2.0) / big_d * (1.0 / weights - d_u)
    return kappa, drift, 1.0 / d_u


def star_fixed_point_kappa(d_u):
    """Curvature of every edge at the star's fixed point."""
    if d_u < 3:
        raise DegreeTooSmall(f"star results need degree >= 3, got {d_u}")
    return 2.0 / d_u


def _tree_flows(m, n, tree, supply, demand):
    """Basic solution carried by one spanning tree of the bipartite support
    graph, via leaf elimination; entries may be negative (infeasible basis)."""
    balance = list(supply) + [-d for d in demand]
    incident = {v: [] for v in range(m + n)}
    for e, (i, j) in enumerate(tree):
        incident[i].append(e)
        incident[m + j].append(e)
    flows = [None] * len(tree)
    alive = {v for v in range(m + n) if incident[v]}
    while alive:
        leaf = next(v for v in alive if len(incident[v]) == 1)
        e = incident[leaf][0]
        i, j = tree[e]
        other = m + j if leaf == i else i
        # flow runs source -> sink, so a source leaf ships its balance out
        flows[e] = balance[leaf] if leaf == i else -balance[leaf]
        balance[other] += balance[leaf]
        balance[leaf] = 0.0
        incident[leaf].remove(e)
        incident[other].remove(e)
        alive.discard(leaf)
        if not incident[other]:
            alive.discard(other)
    return flows


def transport_bruteforce(p):
    """Minimal transport cost by enumerating every basis of the polytope.

    Bases of the transportation polytope are the spanning trees of the
    complete bipartite support graph; each carries a unique basic solution,
    and the optimum sits at a feasible one.
    """
    p.validate()
    m, n = len(p.sources), len(p.sinks)
    if m > 4 or n > 4:
        raise SupportTooLarge(f"supports of size {m} x {n} exceed 4 x 4")
    supply = [mass for _, mass in p.sources]
    demand = [mass for _, mass in p.sinks]
    cells = [(i, j) for i in range(m) for j in range(n)]
    best = None
    for tree in itertools.combinations(cells, m + n - 1):
        parent = list(range(m + n))

        def find(v):
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        acyclic = True
        for i, j in tree:
            ri, rj = find(i), find(m + j)
            if ri == rj:
                acyclic = False
                break
            parent[ri] = rj
        if not acyclic:  # m+n-1 acyclic edges always span
            continue
        flows = _tree_flows(m, n, tree, supply, demand)
        if min(flows) < -1e-12:
            continue
        cost = sum(f * p.cost[i, j] for f, (i, j) in zip(flows, tree))
        if best is None or cost < best:
            best = cost
    assert best is not None  # balanced problems always have a feasible basis
    return float(best)
