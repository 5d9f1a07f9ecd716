import numpy as np
import pytest

from conftest import path_graph, star_graph
from ricciflow import (FlowConfig, Gamma, NonConvergence, WeightedGraph,
                       communities, rhs_normalized, run_flow_with_surgery)


def _cfg(**kw):
    base = dict(gamma=Gamma.reciprocal(), integrator="rk45", horizon=100.0,
                mt=1e-3, renormalize=True, conserve_total=True,
                conv_tol=1e-11)
    base.update(kw)
    return FlowConfig(**base)


def test_path6_reduces_to_path2(rng):
    w = rng.uniform(0.2, 1.0, 6)
    w /= w.sum()
    res = run_flow_with_surgery(path_graph(w), _cfg())
    assert res.graph.num_edges == 2
    assert all(e.kind == "contract" for e in res.events)
    # stationary final minor
    rate = np.abs(rhs_normalized(res.graph, Gamma.reciprocal(),
                                 res.graph.weight_vector())).max()
    assert rate < 1e-10
    # event times strictly increase and levels are nondecreasing
    ts = [e.t for e in res.events]
    assert ts == sorted(ts)
    levels = [e.level for e in res.events]
    assert levels == sorted(levels)


def test_star_no_surgery():
    res = run_flow_with_surgery(star_graph([0.4, 0.3, 0.2, 0.1]),
                                _cfg(renormalize=False))
    assert res.events == []
    np.testing.assert_allclose(res.graph.weight_vector(), 0.25, atol=1e-5)
    assert len(communities(res)) == 5  # no merges: singleton classes
    assert set(res.labels.values()) == {0}


def test_two_triangles_two_communities():
    g = WeightedGraph([(0, 1, 0.05), (1, 2, 0.05), (0, 2, 0.05),
                       (3, 4, 0.05), (4, 5, 0.05), (3, 5, 0.05),
                       (2, 3, 0.7)])
    res = run_flow_with_surgery(g, _cfg(horizon=200.0, mt=1e-2))
    comms = communities(res)
    assert len(comms) == 2
    assert sorted(sorted(c) for c in comms) == [[0, 1, 2], [3, 4, 5]]


def test_delete_event_from_violating_state():
    g = WeightedGraph([(0, 1, 0.2), (1, 2, 0.2), (0, 2, 0.6)])
    res = run_flow_with_surgery(g, _cfg(horizon=50.0))
    assert res.events[0].kind == "delete"
    assert res.events[0].edge == (0, 2)
    assert not res.graph.has_edge(0, 2)
    assert len(communities(res)) == 3  # deletions never merge vertices


def test_merge_map_partitions_original_vertices(rng):
    w = rng.uniform(0.2, 1.0, 6)
    w /= w.sum()
    g = path_graph(w)
    res = run_flow_with_surgery(g, _cfg())
    merged = set()
    for c in communities(res):
        assert not (merged & c)
        merged |= c
    assert merged == set(g.vertices)


def test_nonconvergence_and_perturb_retry():
    g = star_graph([0.5, 0.3, 0.2])
    stall = _cfg(horizon=0.5, conv_tol=1e-14, renormalize=False)
    with pytest.raises(NonConvergence) as exc:
        run_flow_with_surgery(g, stall)
    assert exc.value.horizon == 0.5
    assert exc.value.tail is not None
    # retry branch runs, still stalls, and re-raises
    with pytest.raises(NonConvergence):
        run_flow_with_surgery(g, stall, perturb_on_stall=True, seed=3)


def test_perturb_retry_deterministic():
    # same seed, same outcome twice (trajectory weights byte-identical)
    g = star_graph([0.5, 0.3, 0.2])
    cfg = _cfg(renormalize=False)
    a = run_flow_with_surgery(g, cfg, perturb_on_stall=True, seed=11)
    b = run_flow_with_surgery(g, cfg, perturb_on_stall=True, seed=11)
    np.testing.assert_array_equal(a.graph.weight_vector(),
                                  b.graph.weight_vector())


def test_result_json_schema(rng):
    w = rng.uniform(0.2, 1.0, 6)
    w /= w.sum()
    res = run_flow_with_surgery(path_graph(w), _cfg())
    doc = res.to_json()
    assert {"final_minor", "hierarchy", "events", "communities",
            "curvature", "perturbed"} <= set(doc)
    assert doc["final_minor"]["vertices"] == res.graph.num_vertices
    for ev in doc["events"]:
        assert {"t", "kind", "u", "v", "level"} <= set(ev)
    assert sorted(v for c in doc["communities"] for v in c) == list(range(7))


def test_renormalize_keeps_unit_total(rng):
    w = rng.uniform(0.2, 1.0, 6)
    w /= w.sum()
    res = run_flow_with_surgery(path_graph(w), _cfg())
    assert res.graph.total_weight() == pytest.approx(1.0, abs=1e-9)
