"""Lazy-walk measures, idleness curvature, and the limit curvature.

The primary path computes the limit curvature exactly, as the optimum of a
small linear program over Lipschitz potentials on the closed one-step
neighborhoods of the edge's endpoints; the idleness extrapolation is kept
as a cross-check only.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DistanceConditionViolated, NonLinearTail
from .graph import all_pairs_distances, edge_key
from .lp import solve_lp
from .transport import TransportProblem, min_cost_transport

DIST_TOL = 1e-12  # slack allowed before an edge fails the distance condition
KAPPA_UPPER = 2.0


@dataclass(frozen=True)
class Gamma:
    """Edge-weight reweighting x -> x**exponent shaping the walk measure.

    Kept as a closed family of power functions: they are positive and
    one-to-one on (0, 1], Lipschitz on [delta, 1], and homogeneity makes
    curvature scale invariance statically true.
    """

    exponent: float

    def __post_init__(self):
        if self.exponent == 0:
            raise ValueError("exponent must be nonzero for a one-to-one map")

    def __call__(self, x):
        return float(x) ** self.exponent

    @classmethod
    def reciprocal(cls):
        return cls(-1.0)

    @classmethod
    def identity(cls):
        return cls(1.0)

    @classmethod
    def reciprocal_square(cls):
        return cls(-2.0)

    @classmethod
    def power(cls, k):
        return cls(float(k))

    @classmethod
    def parse(cls, spec):
        named = {
            "reciprocal": -1.0,
            "identity": 1.0,
            "reciprocal-square": -2.0,
        }
        if spec in named:
            return cls(named[spec])
        if spec.startswith("power:"):
            return cls(float(spec.split(":", 1)[1]))
        raise ValueError(f"unknown gamma spec {spec!r}")

    @property
    def name(self):
        return {-1.0: "reciprocal", 1.0: "identity", -2.0: "reciprocal-square"}.get(
            self.exponent, f"power:{self.exponent:g}"
        )


@dataclass(frozen=True)
class ProbMeasure:
    """Finite-support distribution of the lazy walk centered at one vertex."""

    center: int
    alpha: float
    masses: dict

    def __post_init__(self):
        total = sum(self.masses.values())
        assert abs(total - 1.0) <= 1e-12, total


def measure(g, gamma, x, alpha):
    """Walk measure: mass alpha at x, the rest spread over N(x) by gamma."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"idleness {alpha} outside [0, 1]")
    masses = {x: alpha}
    if alpha < 1.0:
        nbrs = g.neighbors(x)
        vals = np.array([gamma(g.weight(x, z)) for z in nbrs])
        vals *= (1.0 - alpha) / vals.sum()
        for z, m in zip(nbrs, vals):
            masses[z] = masses.get(z, 0.0) + float(m)
    return ProbMeasure(x, alpha, masses)


def _check_distance_condition(g, edge, dist, tol):
    u, v = edge_key(*edge)
    w = g.weight(u, v)
    d = dist.d(u, v)
    if w - d > tol:
        raise DistanceConditionViolated((u, v), w, d)
    return w


def alpha_ricci(g, gamma, edge, alpha, dist=None):
    """Idleness curvature 1 - W(mu_x, mu_y) / d(x, y)."""
    if dist is None:
        dist = all_pairs_distances(g)
    x, y = edge_key(*edge)
    if not g.has_edge(x, y):
        raise KeyError(f"no edge {(x, y)}")
    mu_x = measure(g, gamma, x, alpha)
    mu_y = measure(g, gamma, y, alpha)
    problem = TransportProblem.between_measures(mu_x.masses, mu_y.masses, dist)
    plan = min_cost_transport(problem)
    return 1.0 - plan.cost / dist.d(x, y)


def _pruned_pairs(support, dist):
    """Pairwise Lipschitz constraints minus those implied through a third
    support vertex lying on a geodesic (chains of shorter constraints)."""
    n = len(support)
    d = np.array([[dist.d(a, b) for b in support] for a in support])
    pairs = []
    for i in range(n):
        for j in range(i + 1, n):
            through = d[i, :] + d[:, j]
            through[i] = through[j] = np.inf
            if through.min() > d[i, j] + 1e-12:
                pairs.append((i, j))
    return pairs, d


def lly_curvature_lp(g, gamma, edge, dist=None, dist_tol=DIST_TOL):
    """Limit curvature as the exact optimum of the Lipschitz-potential LP.

    Variables are potentials on the closed neighborhoods of the endpoints;
    any feasible potential extends 1-Lipschitz to the rest of the graph, and
    the objective only reads the neighborhoods, so the restriction is exact.
    """
    if dist is None:
        dist = all_pairs_distances(g)
    x, y = edge_key(*edge)
    if not g.has_edge(x, y):
        raise KeyError(f"no edge {(x, y)}")
    d_xy = dist.d(x, y)
    _check_distance_condition(g, (x, y), dist, dist_tol)

    support = sorted({x, y} | set(g.neighbors(x)) | set(g.neighbors(y)))
    pos = {v: i for i, v in enumerate(support)}
    # gradient gauge: f(x) = 0 and the unit-gradient constraint pins f(y)
    fixed = {pos[x]: 0.0, pos[y]: d_xy}

    # objective (laplacian at x minus laplacian at y) / d(x, y), linear in f
    coeff = np.zeros(len(support))
    for center, sign in ((x, 1.0), (y, -1.0)):
        nbrs = g.neighbors(center)
        gvals = np.array([gamma(g.weight(center, z)) for z in nbrs])
        gvals *= sign / (gvals.sum() * d_xy)
        for z, gz in zip(nbrs, gvals):
            coeff[pos[z]] += gz
            coeff[pos[center]] -= gz

    free = [i for i in range(len(support)) if i not in fixed]
    if not free:
        return float(sum(coeff[i] * fv for i, fv in fixed.items()))
    col = {i: k for k, i in enumerate(free)}

    pairs, dmat = _pruned_pairs(support, dist)
    rows, bounds = [], []
    for i, j in pairs:
        if i in fixed and j in fixed:
            continue
        row = np.zeros(len(free))
        shift = 0.0
        for a, s in ((i, 1.0), (j, -1.0)):
            if a in fixed:
                shift += s * fixed[a]
            else:
                row[col[a]] = s
        rows.append(row.copy())
        bounds.append(dmat[i, j] - shift)
        rows.append(-row)
        bounds.append(dmat[i, j] + shift)

    c = np.array([coeff[i] for i in free])
    const = sum(coeff[i] * fv for i, fv in fixed.items())
    opt, _ = solve_lp(c, np.array(rows), np.array(bounds))
    return float(const + opt)


def lly_curvature_extrapolated(g, gamma, edge, alpha_grid, dist=None,
                               residual_tol=1e-3):
    """Slope of kappa_alpha against (1 - alpha) through the origin.

    Cross-check for the LP path; the idleness curvature is exactly linear
    on the final piece near alpha = 1, so the grid must sit inside it.
    """
    alphas = sorted(alpha_grid)
    if len(alphas) < 3 or alphas[0] < 0.9 or alphas[-1] >= 1.0:
        raise ValueError("alpha grid must hold >= 3 points inside [0.9, 1)")
    if dist is None:
        dist = all_pairs_distances(g)
    gaps = np.array([1.0 - a for a in alphas])
    kappas = np.array([alpha_ricci(g, gamma, edge, a, dist) for a in alphas])
    slope = float(kappas @ gaps / (gaps @ gaps))
    residual = float(np.abs(kappas - slope * gaps).max())
    if residual > residual_tol:
        raise NonLinearTail(
            f"fit residual {residual:.3e}; a piecewise break lies inside the "
            "grid, retry with alphas closer to 1"
        )
    return slope


@dataclass(frozen=True)
class CurvatureBounds:
    """Certified enclosure of the limit curvature of one edge."""

    generic_lower: float   # -2 D(G) / d(u, v)
    coupling_lower: float  # explicit star-coupling certificate
    upper: float = KAPPA_UPPER

    @property
    def lower(self):
        return max(self.generic_lower, self.coupling_lower)


def curvature_bounds(g, gamma, edge, dist=None):
    """Generic lower/upper bounds plus the explicit coupling certificate.

    The certificate evaluates one feasible signed coupling between the
    idleness-zero walk measures, so it lower-bounds the supremum that
    equals the curvature.
    """
    if dist is None:
        dist = all_pairs_distances(g)
    u, v = edge_key(*edge)
    d_uv = dist.d(u, v)
    generic = -2.0 * g.max_weight() / d_uv

    total = 2.0 * d_uv
    for center, other in ((u, v), (v, u)):
        nbrs = g.neighbors(center)
        dsum = sum(gamma(g.weight(center, z)) for z in nbrs)
        for z in nbrs:
            if z == other:
                continue  # pairs with the center map to distance zero terms
            total -= gamma(g.weight(center, z)) / dsum * dist.d(z, other)
    return CurvatureBounds(generic, total / d_uv)


@dataclass(frozen=True)
class EdgeCurvature:
    u: int
    v: int
    kappa: float
    lower: float
    upper: float
    kappa_alpha: dict = field(default_factory=dict)


@dataclass(frozen=True)
class CurvatureReport:
    """Per-edge curvatures with certified bounds."""

    gamma: Gamma
    edges: tuple

    def to_json(self):
        return {
            "gamma": self.gamma.name,
            "edges": [
                {"u": e.u, "v": e.v, "kappa": e.kappa,
                 "lower": e.lower, "upper": e.upper,
                 **({"kappa_alpha": e.kappa_alpha} if e.kappa_alpha else {})}
                for e in self.edges
            ],
        }


def edge_curvatures(g, gamma, dist=None, dist_tol=DIST_TOL):
    """Limit curvature of every edge, aligned with `g.edge_list`."""
    if dist is None:
        dist = all_pairs_distances(g)
    return np.array([
        lly_curvature_lp(g, gamma, e, dist, dist_tol) for e in g.edge_list
    ])


def curvature_report(g, gamma, alphas=(), dist=None):
    if dist is None:
        dist = all_pairs_distances(g)
    entries = []
    for u, v in g.edge_list:
        kappa = lly_curvature_lp(g, gamma, (u, v), dist)
        bounds = curvature_bounds(g, gamma, (u, v), dist)
        samples = {a: alpha_ricci(g, gamma, (u, v), a, dist) for a in alphas}
        entries.append(EdgeCurvature(u, v, kappa, bounds.lower, bounds.upper,
                                     samples))
    return CurvatureReport(gamma, tuple(entries))
