"""Figure rendering for reports: curvature bars, trajectories, hierarchies.

Figures are written straight to files next to the delimited outputs; the
Agg backend keeps this headless-safe.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402


def _edge_label(u, v):
    return f"{u}–{v}"


def plot_curvature(report, path):
    """Per-edge curvature bars with the certified bound interval."""
    edges = report.edges
    labels = [_edge_label(e.u, e.v) for e in edges]
    kappa = np.array([e.kappa for e in edges])
    lower = np.array([e.lower for e in edges])
    upper = np.array([e.upper for e in edges])
    xs = np.arange(len(edges))

    fig, ax = plt.subplots(figsize=(max(4.0, 0.6 * len(edges) + 2), 3.5))
    ax.bar(xs, kappa, color="#4878d0", label="curvature")
    ax.errorbar(xs, kappa, yerr=[kappa - lower, upper - kappa],
                fmt="none", ecolor="#555555", capsize=3, label="bounds")
    ax.axhline(0.0, color="black", linewidth=0.8)
    ax.set_xticks(xs, labels, rotation=45 if len(edges) > 8 else 0)
    ax.set_ylabel("curvature")
    ax.set_title(f"edge curvature ({report.gamma.name})")
    ax.legend(loc="best", fontsize="small")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_trajectory(traj, path):
    """Weights and curvatures of every edge against time."""
    fig, (ax_w, ax_k) = plt.subplots(2, 1, sharex=True, figsize=(6, 5))
    for j, (u, v) in enumerate(traj.edges):
        label = _edge_label(u, v)
        ax_w.plot(traj.times, traj.weights[:, j], label=label)
        ax_k.plot(traj.times, traj.kappas[:, j], label=label)
    if traj.event is not None:
        kind, _ = traj.event
        for ax in (ax_w, ax_k):
            ax.axvline(traj.times[-1], color="red", linestyle="--",
                       linewidth=0.8)
        ax_w.text(traj.times[-1], ax_w.get_ylim()[1], f" {kind}",
                  color="red", va="top", fontsize="small")
    ax_w.set_ylabel("weight")
    ax_k.set_ylabel("curvature")
    ax_k.set_xlabel("t")
    ax_w.set_title(f"{traj.metadata['mode']} flow, "
                   f"gamma={traj.metadata['gamma']}")
    if len(traj.edges) <= 12:
        ax_w.legend(loc="best", fontsize="small", ncols=2)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_hierarchy(result, path):
    """Surgery timeline and the resulting community sizes."""
    fig, (ax_ev, ax_c) = plt.subplots(1, 2, figsize=(8, 3.5))

    colors = {"delete": "#d65f5f", "contract": "#4878d0"}
    for i, ev in enumerate(result.events):
        ax_ev.scatter(ev.t, i, color=colors[ev.kind], s=30)
        ax_ev.annotate(f"{ev.kind} {_edge_label(*ev.edge)} (L{ev.level})",
                       (ev.t, i), textcoords="offset points",
                       xytext=(6, -3), fontsize="small")
    ax_ev.set_xlabel("t")
    ax_ev.set_yticks([])
    ax_ev.set_title("surgery events")
    if not result.events:
        ax_ev.text(0.5, 0.5, "no events", transform=ax_ev.transAxes,
                   ha="center", va="center")

    from .surgery import communities

    sizes = [len(c) for c in communities(result)]
    ax_c.bar(np.arange(len(sizes)), sizes, color="#6acc64")
    ax_c.set_xlabel("community")
    ax_c.set_ylabel("vertices")
    ax_c.set_title(f"{len(sizes)} communities")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
