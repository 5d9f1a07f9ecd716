"""Curvature flow on weighted graphs.

Edge curvature via Lipschitz-potential linear programs, continuous
normalized/unnormalized curvature flow with event detection, and
surgery-based hierarchy/community extraction.
"""

from .curvature import (CurvatureBounds, CurvatureReport, EdgeCurvature,
                        Gamma, ProbMeasure, alpha_ricci, curvature_bounds,
                        curvature_report, edge_curvatures,
                        lly_curvature_extrapolated, lly_curvature_lp, measure)
from .errors import (DegreeTooSmall, DisconnectedGraph,
                     DistanceConditionViolated, Infeasible, NonConvergence,
                     NonLinearTail, NonPositiveWeight, ParseError,
                     RegimeMismatch, RicciFlowError, StepUnderflow,
                     SupportTooLarge, Unbalanced, Unbounded, WouldDisconnect)
from .flow import (FlowConfig, FlowState, FlowTrajectory, integrate,
                   rhs_normalized, rhs_unnormalized, step, total_weight)
from .graph import (DistanceMatrix, MergeMap, WeightedGraph,
                    all_pairs_distances, contract_edge, delete_edge, edge_key,
                    load_graph, parse_edge_list, parse_json_graph)
from .surgery import (HierarchyResult, SurgeryEvent, communities,
                      run_flow_with_surgery)
from .transport import (TransportPlan, TransportProblem, min_cost_transport,
                        w1_dual)

__version__ = "1.0.0"

__all__ = [
    "CurvatureBounds", "CurvatureReport", "EdgeCurvature", "Gamma",
    "ProbMeasure", "alpha_ricci", "curvature_bounds", "curvature_report",
    "edge_curvatures", "lly_curvature_extrapolated", "lly_curvature_lp",
    "measure",
    "DegreeTooSmall", "DisconnectedGraph", "DistanceConditionViolated",
    "Infeasible", "NonConvergence", "NonLinearTail", "NonPositiveWeight",
    "ParseError", "RegimeMismatch", "RicciFlowError", "StepUnderflow",
    "SupportTooLarge", "Unbalanced", "Unbounded", "WouldDisconnect",
    "FlowConfig", "FlowState", "FlowTrajectory", "integrate",
    "rhs_normalized", "rhs_unnormalized", "step", "total_weight",
    "DistanceMatrix", "MergeMap", "WeightedGraph", "all_pairs_distances",
    "contract_edge", "delete_edge", "edge_key", "load_graph",
    "parse_edge_list", "parse_json_graph",
    "HierarchyResult", "SurgeryEvent", "communities", "run_flow_with_surgery",
    "TransportPlan", "TransportProblem", "min_cost_transport", "w1_dual",
]
