"""Surgery driver: flow segments, delete/contract events, hierarchy levels.

The driver repeats { integrate -> on event, apply one surgery -> restart }
until a segment converges; converged edges get the current hierarchy level,
the level increments, and the loop continues until a whole level passes
with no surgery. Communities are the merge-map classes of the original
vertices: contractions join vertices, deletions never do.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .curvature import curvature_report
from .errors import NonConvergence, WouldDisconnect
from .flow import integrate
from .graph import MergeMap, contract_edge, delete_edge

PERTURB_SCALE = 1e-6  # relative size of the seeded retry perturbation


@dataclass(frozen=True)
class SurgeryEvent:
    t: float               # absolute flow time across restarts
    kind: str              # delete | contract
    edge: tuple            # (u, v) in the graph at event time
    level: int

    def to_json(self):
        return {"t": self.t, "kind": self.kind,
                "u": self.edge[0], "v": self.edge[1], "level": self.level}


@dataclass
class HierarchyResult:
    """Final minor with the surgery bookkeeping of the whole run."""

    graph: object                  # final WeightedGraph minor
    labels: dict                   # surviving edge -> hierarchy level
    merge_map: MergeMap
    events: list                   # SurgeryEvent log
    report: object                 # final CurvatureReport
    trajectories: list             # FlowTrajectory per segment
    perturbed: bool = False        # retry branch was taken

    def to_json(self):
        return {
            "final_minor": self.graph.to_json(),
            "hierarchy": [
                {"u": u, "v": v, "level": lvl}
                for (u, v), lvl in sorted(self.labels.items())
            ],
            "events": [e.to_json() for e in self.events],
            "communities": [sorted(c) for c in communities(self)],
            "curvature": self.report.to_json(),
            "perturbed": self.perturbed,
        }


def communities(result):
    """Partition of the original vertices by merge-map representative."""
    groups = result.merge_map.groups()
    return sorted((frozenset(g) for g in groups.values()), key=min)


def _apply_surgery(g, kind, edge, merge_map):
    if kind == "delete":
        return delete_edge(g, edge), merge_map
    return contract_edge(g, edge, merge_map)


def _run_once(g, config, perturb_rng=None):
    if perturb_rng is not None:
        w = g.weight_vector()
        w = w * (1.0 + PERTURB_SCALE * perturb_rng.choice([-1.0, 1.0], w.size))
        g = g.with_weights(w)

    merge_map = MergeMap(g.vertices)
    labels = {}
    events = []
    trajectories = []
    level = 0
    t_base = 0.0
    surgeries_this_level = 0

    while True:
        traj = integrate(g, config)
        trajectories.append(traj)
        t_base += float(traj.times[-1])

        if traj.stop_reason == "event":
            kind, edge = traj.event
            g, merge_map = _apply_surgery(g.with_weights(traj.weights[-1]),
                                          kind, edge, merge_map)
            events.append(SurgeryEvent(t_base, kind, edge, level))
            surgeries_this_level += 1
            # stale labels of removed edges
            labels = {e: lvl for e, lvl in labels.items()
                      if g.has_edge(*e)}
            if config.renormalize:
                g = g.with_weights(g.weight_vector() / g.total_weight())
            if g.num_edges == 1:
                # nothing left to separate; a single edge is its own level
                for e in g.edge_list:
                    labels[e] = level
                break
            continue

        if traj.stop_reason == "converged":
            g = g.with_weights(traj.weights[-1])
            for e in g.edge_list:
                labels[e] = level
            if surgeries_this_level == 0:
                # a whole level without surgery: the run is stationary
                break
            level += 1
            surgeries_this_level = 0
            continue

        raise NonConvergence(config.horizon, tail=traj)

    return g, labels, merge_map, events, trajectories


def run_flow_with_surgery(g, config, perturb_on_stall=False, seed=0):
    """Run the full surgery loop; optionally retry once with a seeded
    multiplicative perturbation of the initial weights when the flow stalls
    at the horizon (the auditable stand-in for 'slightly perturb')."""
    try:
        final, labels, mm, events, trajs = _run_once(g, config)
        perturbed = False
    except NonConvergence:
        if not perturb_on_stall:
            raise
        rng = np.random.default_rng(seed)
        final, labels, mm, events, trajs = _run_once(g, config, perturb_rng=rng)
        perturbed = True

    report = curvature_report(final, config.gamma)
    return HierarchyResult(final, labels, mm, events, report, trajs, perturbed)
