"""Exception hierarchy shared across the package."""


class RicciFlowError(Exception):
    """Base class for all errors raised by this package."""


# --- graph construction / surgery ---

class ParseError(RicciFlowError):
    """Input document could not be parsed into a weighted graph."""


class NonPositiveWeight(RicciFlowError):
    """An edge weight is zero or negative."""


class DisconnectedGraph(RicciFlowError):
    """The graph (or the graph after an operation) is not connected."""


class WouldDisconnect(RicciFlowError):
    """Deleting this edge would disconnect the graph."""


# --- linear programming / transport ---

class Infeasible(RicciFlowError):
    """The linear program has no feasible point."""


class Unbounded(RicciFlowError):
    """The linear program objective is unbounded below."""


class Unbalanced(RicciFlowError):
    """Source and sink masses of a transport problem do not match."""


# --- curvature ---

class DistanceConditionViolated(RicciFlowError):
    """An edge is longer than the shortest path between its endpoints.

    Curvature is only defined on edges realizing the distance between
    their endpoints; the flow driver repairs this by deleting the edge.
    """

    def __init__(self, edge, weight, distance):
        self.edge = edge
        self.weight = weight
        self.distance = distance
        super().__init__(
            f"edge {edge} has weight {weight:.12g} exceeding the shortest "
            f"alternative path of length {distance:.12g}"
        )


class NonLinearTail(RicciFlowError):
    """The sampled idleness grid does not lie on a single linear piece."""


# --- flow / surgery ---

class StepUnderflow(RicciFlowError):
    """Integrator cannot maintain positive weights at any step size."""


class NonConvergence(RicciFlowError):
    """Flow reached the time horizon without converging or triggering surgery."""

    def __init__(self, horizon, tail=None):
        self.horizon = horizon
        self.tail = tail
        super().__init__(f"no convergence or surgery event by t={horizon:g}")


# --- analytic oracles ---

class RegimeMismatch(RicciFlowError):
    """Initial weights do not match the regime's closed-form assumptions."""


class SupportTooLarge(RicciFlowError):
    """Brute-force transport enumeration is limited to supports of size 4."""


class DegreeTooSmall(RicciFlowError):
    """Star results require an internal vertex of degree at least 3."""
