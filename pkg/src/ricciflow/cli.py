"""Command-line entry point: curvature reports, flow runs, detection, validation.

Exit codes: 0 success, 1 parse/validation failure of inputs, 2 solver
failure, 3 flow failure (step underflow / non-convergence), 4 oracle-suite
validation failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .curvature import Gamma, curvature_report
from .errors import (Infeasible, NonConvergence, RicciFlowError, StepUnderflow,
                     Unbounded)
from .flow import FlowConfig, integrate
from .graph import load_graph
from .surgery import run_flow_with_surgery
from .validate import run_suite

EXIT_PARSE = 1
EXIT_SOLVER = 2
EXIT_FLOW = 3
EXIT_VALIDATE = 4


def _add_common(parser):
    parser.add_argument("graph", help="edge-list or JSON graph file")
    parser.add_argument("--gamma", default="reciprocal",
                        help="reciprocal | identity | reciprocal-square | power:k")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--plot", action="store_true",
                        help="render figures next to the outputs")


def _add_flow_flags(parser):
    parser.add_argument("--mode", default="normalized",
                        choices=["normalized", "unnormalized"])
    parser.add_argument("--integrator", default="rk4",
                        choices=["euler", "rk4", "rk45"])
    parser.add_argument("--h", type=float, default=1e-3,
                        help="fixed step size (initial step for rk45)")
    parser.add_argument("--horizon", type=float, default=10.0)
    parser.add_argument("--mt", type=float, default=1e-3,
                        help="merge threshold for contraction events")
    parser.add_argument("--renormalize", action="store_true",
                        help="rescale to total weight 1 after each surgery")
    parser.add_argument("--conserve-total", action="store_true",
                        help="project each step back onto the conserved total")
    parser.add_argument("--conv-tol", type=float, default=1e-10)
    parser.add_argument("--seed", type=int, default=0)


def _flow_config(args):
    return FlowConfig(
        mode=args.mode,
        gamma=Gamma.parse(args.gamma),
        integrator=args.integrator,
        h=args.h,
        mt=args.mt,
        renormalize=args.renormalize,
        horizon=args.horizon,
        conv_tol=args.conv_tol,
        conserve_total=args.conserve_total,
    )


def _outdir(args):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_curvature(args):
    g = load_graph(args.graph)
    gamma = Gamma.parse(args.gamma)
    alphas = tuple(float(a) for a in args.alphas.split(",")) if args.alphas else ()
    report = curvature_report(g, gamma, alphas=alphas)

    out = _outdir(args)
    path = out / "curvature.json"
    path.write_text(json.dumps(report.to_json(), indent=2) + "\n")

    print(f"{'edge':>10} {'kappa':>14} {'lower':>14} {'upper':>8}")
    for e in report.edges:
        print(f"{e.u:>4} {e.v:>5} {e.kappa:>14.9f} {e.lower:>14.9f} "
              f"{e.upper:>8.3f}")
    print(f"wrote {path}")

    if args.plot:
        from .plotting import plot_curvature
        print(f"wrote {plot_curvature(report, out / 'curvature.png')}")
    return 0


def cmd_flow(args):
    g = load_graph(args.graph)
    config = _flow_config(args)
    traj = integrate(g, config)

    out = _outdir(args)
    csv_path = out / "trajectory.csv"
    with open(csv_path, "w") as fh:
        traj.to_csv(fh)
    events_path = out / "events.json"
    events_path.write_text(json.dumps(traj.events_json(), indent=2) + "\n")

    print(f"stopped: {traj.stop_reason} at t={traj.times[-1]:g}, "
          f"final max|dw/dt| = {traj.final_max_rate:.3e}")
    print(f"wrote {csv_path}")
    print(f"wrote {events_path}")

    if args.plot:
        from .plotting import plot_trajectory
        print(f"wrote {plot_trajectory(traj, out / 'trajectory.png')}")
    return 0


def cmd_detect(args):
    g = load_graph(args.graph)
    config = _flow_config(args)
    result = run_flow_with_surgery(g, config,
                                   perturb_on_stall=args.perturb_on_stall,
                                   seed=args.seed)

    out = _outdir(args)
    path = out / "detect.json"
    path.write_text(json.dumps(result.to_json(), indent=2) + "\n")

    doc = result.to_json()
    print(f"{len(result.events)} surgery events, "
          f"{len(doc['communities'])} communities")
    for com in doc["communities"]:
        print(f"  community: {com}")
    print(f"wrote {path}")

    if args.plot:
        from .plotting import plot_hierarchy, plot_trajectory
        print(f"wrote {plot_hierarchy(result, out / 'hierarchy.png')}")
        print(f"wrote {plot_trajectory(result.trajectories[-1], out / 'final_segment.png')}")
    return 0


def cmd_validate(args):
    results = run_suite(filter_group=args.filter, seed=args.seed)
    width = max(len(f"{r.group}/{r.name}") for r in results)
    failures = 0
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status}  {r.group + '/' + r.name:<{width}}  {r.detail}")
        failures += not r.passed
    print(f"{len(results) - failures}/{len(results)} checks passed")
    return EXIT_VALIDATE if failures else 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ricciflow",
        description="curvature flow on weighted graphs: curvature reports, "
                    "flow trajectories, surgery-based community detection",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("curvature", help="per-edge curvature report")
    _add_common(p)
    p.add_argument("--alphas", default="",
                   help="comma-separated idleness samples to include")
    p.set_defaults(fn=cmd_curvature)

    p = sub.add_parser("flow", help="integrate one flow segment")
    _add_common(p)
    _add_flow_flags(p)
    p.set_defaults(fn=cmd_flow)

    p = sub.add_parser("detect", help="full surgery run with communities")
    _add_common(p)
    _add_flow_flags(p)
    p.add_argument("--perturb-on-stall", action="store_true",
                   help="retry once with seeded perturbed weights on stall")
    p.set_defaults(fn=cmd_detect)

    p = sub.add_parser("validate", help="run the oracle suite")
    p.add_argument("--filter", default=None,
                   help="run a single group: transport | curvature | limit "
                        "| flow | surgery")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_validate)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (StepUnderflow, NonConvergence) as exc:
        print(f"flow failure: {exc}", file=sys.stderr)
        return EXIT_FLOW
    except (Infeasible, Unbounded) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (RicciFlowError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
