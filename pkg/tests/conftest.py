import numpy as np
import pytest

from ricciflow import WeightedGraph, all_pairs_distances


def random_connected_graph(rng, n, metric_repair=True):
    """Random tree plus extra edges; optionally every edge realizes its
    endpoint distance so curvature is defined everywhere."""
    edges = []
    for v in range(1, n):
        u = int(rng.integers(0, v))
        edges.append((u, v, float(rng.uniform(0.05, 1.0))))
    for _ in range(int(rng.integers(0, n))):
        u, v = rng.choice(n, size=2, replace=False)
        if not any(set(e[:2]) == {int(u), int(v)} for e in edges):
            edges.append((int(u), int(v), float(rng.uniform(0.05, 1.0))))
    g = WeightedGraph(edges)
    if not metric_repair:
        return g
    dist = all_pairs_distances(g)
    return WeightedGraph([(u, v, dist.d(u, v)) for u, v, _ in edges])


def path_graph(weights):
    return WeightedGraph([(i, i + 1, w) for i, w in enumerate(weights)])


def star_graph(weights):
    return WeightedGraph([(0, i + 1, w) for i, w in enumerate(weights)])


@pytest.fixture
def rng():
    return np.random.default_rng(20260823)
