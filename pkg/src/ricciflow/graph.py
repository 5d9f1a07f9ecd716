"""Weighted-graph data model, shortest-path metric, and minor operations.

Graphs are immutable snapshots: surgery and reweighting return new values,
so one snapshot can be shared freely across threads for curvature work.
Vertex ids are stable across surgery; merged vertices are tombstoned in
the merge map and never reused.
"""

from __future__ import annotations

import json

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, dijkstra

from .errors import DisconnectedGraph, NonPositiveWeight, ParseError, WouldDisconnect


def edge_key(u, v):
    """Canonical (min, max) form of an undirected edge."""
    return (u, v) if u < v else (v, u)


class WeightedGraph:
    """Undirected simple connected graph with strictly positive edge weights."""

    def __init__(self, edges, validate=True):
        """`edges` is an iterable of (u, v, w) triples with integer ids."""
        weights = {}
        adj = {}
        for u, v, w in edges:
            u, v, w = int(u), int(v), float(w)
            if u == v:
                raise ParseError(f"self-loop at vertex {u}")
            key = edge_key(u, v)
            if key in weights:
                raise ParseError(f"parallel edge {key}")
            if w <= 0 or not np.isfinite(w):
                raise NonPositiveWeight(f"edge {key} has weight {w}")
            weights[key] = w
            adj.setdefault(u, {})[v] = w
            adj.setdefault(v, {})[u] = w
        self._weights = weights
        self._adj = adj
        self._vertices = tuple(sorted(adj))
        self._index = {v: i for i, v in enumerate(self._vertices)}
        if validate:
            if not weights:
                raise ParseError("graph has no edges")
            if not self.is_connected():
                raise DisconnectedGraph("graph is not connected")

    # --- basic accessors ---

    @property
    def vertices(self):
        return self._vertices

    @property
    def edge_list(self):
        """Edges in sorted canonical order; the flow's weight-vector order."""
        return tuple(sorted(self._weights))

    @property
    def num_vertices(self):
        return len(self._vertices)

    @property
    def num_edges(self):
        return len(self._weights)

    def weight(self, u, v):
        return self._weights[edge_key(u, v)]

    def has_edge(self, u, v):
        return edge_key(u, v) in self._weights

    def neighbors(self, x):
        return tuple(sorted(self._adj[x]))

    def degree(self, x):
        return len(self._adj[x])

    def weight_vector(self):
        """Weights as an array aligned with `edge_list`."""
        return np.array([self._weights[e] for e in self.edge_list])

    def with_weights(self, w):
        """Same topology with a new weight vector aligned to `edge_list`."""
        w = np.asarray(w, dtype=float)
        if w.shape != (self.num_edges,):
            raise ValueError("weight vector length mismatch")
        return WeightedGraph(
            [(u, v, wi) for (u, v), wi in zip(self.edge_list, w)], validate=True
        )

    def total_weight(self):
        return float(sum(self._weights.values()))

    def max_weight(self):
        return float(max(self._weights.values()))

    # --- connectivity and metric ---

    def _csr(self):
        n = self.num_vertices
        idx = self._index
        rows, cols, data = [], [], []
        for (u, v), w in self._weights.items():
            rows += [idx[u], idx[v]]
            cols += [idx[v], idx[u]]
            data += [w, w]
        return csr_matrix((data, (rows, cols)), shape=(n, n))

    def is_connected(self):
        if self.num_vertices <= 1:
            return True
        ncomp, _ = connected_components(self._csr(), directed=False)
        return ncomp == 1

    def to_json(self):
        return {
            "vertices": self.num_vertices,
            "edges": [
                {"u": u, "v": v, "w": self._weights[(u, v)]}
                for u, v in self.edge_list
            ],
        }

    def __repr__(self):
        return f"WeightedGraph(n={self.num_vertices}, m={self.num_edges})"


class DistanceMatrix:
    """Exact all-pairs weighted shortest-path distances of one snapshot."""

    def __init__(self, graph):
        self._index = dict(graph._index)
        self.vertices = graph.vertices
        self.matrix = dijkstra(graph._csr(), directed=False)

    def d(self, u, v):
        return float(self.matrix[self._index[u], self._index[v]])

    def index(self, u):
        return self._index[u]


def all_pairs_distances(g):
    """Weighted shortest-path distances, Dijkstra per source."""
    return DistanceMatrix(g)


class MergeMap:
    """Union-find over original vertex ids, tracking contraction history."""

    def __init__(self, vertices=()):
        self._parent = {v: v for v in vertices}

    def copy(self):
        m = MergeMap()
        m._parent = dict(self._parent)
        return m

    def add(self, v):
        self._parent.setdefault(v, v)

    def find(self, v):
        root = v
        while self._parent[root] != root:
            root = self._parent[root]
        while self._parent[v] != root:  # path compression
            self._parent[v], v = root, self._parent[v]
        return root

    def merge(self, survivor, absorbed):
        self._parent[self.find(absorbed)] = self.find(survivor)

    def groups(self):
        """Partition of all original ids by representative."""
        out = {}
        for v in self._parent:
            out.setdefault(self.find(v), set()).add(v)
        return {rep: frozenset(members) for rep, members in out.items()}

    def __len__(self):
        return len(self._parent)


# --- ingestion ---

def parse_edge_list(text):
    """One `u v w` triple per line; blank lines and `#` comments skipped."""
    edges = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ParseError(f"line {lineno}: expected 'u v w', got {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
            w = float(parts[2])
        except ValueError as exc:
            raise ParseError(f"line {lineno}: {exc}") from None
        if u < 0 or v < 0:
            raise ParseError(f"line {lineno}: vertex ids must be nonnegative")
        edges.append((u, v, w))
    return WeightedGraph(edges)


def parse_json_graph(text):
    """JSON document `{"vertices": N, "edges": [{"u", "v", "w"}, ...]}`."""
    try:
        doc = json.loads(text)
        edges = [(e["u"], e["v"], e["w"]) for e in doc["edges"]]
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise ParseError(f"malformed graph document: {exc}") from None
    g = WeightedGraph(edges)
    declared = doc.get("vertices")
    if declared is not None and declared != g.num_vertices:
        raise ParseError(
            f"document declares {declared} vertices, edges span {g.num_vertices}"
        )
    return g


def load_graph(path):
    """Load a validated graph from an edge-list or JSON file."""
    with open(path) as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        return parse_json_graph(text)
    return parse_edge_list(text)


# --- surgery primitives ---

def delete_edge(g, edge):
    """Remove one edge; raises WouldDisconnect if no alternative path exists."""
    key = edge_key(*edge)
    if key not in g._weights:
        raise KeyError(f"no edge {key}")
    remaining = [(u, v, w) for (u, v), w in g._weights.items() if (u, v) != key]
    if not remaining:
        raise WouldDisconnect(f"edge {key} is the last edge")
    try:
        out = WeightedGraph(remaining)
    except DisconnectedGraph:
        raise WouldDisconnect(f"edge {key} is a bridge") from None
    if out.num_vertices != g.num_vertices:
        # an endpoint lost its only edge; the vertex set must be preserved
        raise WouldDisconnect(f"edge {key} is a bridge")
    return out


def contract_edge(g, edge, merge_map=None):
    """Merge v into u. Parallel edges keep the smaller weight (weights are
    lengths, the shorter connection dominates the metric); self-loops drop.
    """
    u, v = edge
    if not g.has_edge(u, v):
        raise KeyError(f"no edge {edge_key(u, v)}")
    mm = merge_map.copy() if merge_map is not None else MergeMap(g.vertices)
    mm.merge(u, v)
    new = {}
    for (a, b), w in g._weights.items():
        a2 = u if a == v else a
        b2 = u if b == v else b
        if a2 == b2:
            continue  # contracted edge or loop created by the merge
        key = edge_key(a2, b2)
        new[key] = min(w, new[key]) if key in new else w
    graph = WeightedGraph([(a, b, w) for (a, b), w in new.items()])
    return graph, mm
