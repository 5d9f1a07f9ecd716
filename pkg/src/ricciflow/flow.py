"""Continuous curvature flow on edge weights with event monitoring.

The normalized flow shrinks positively curved edges and stretches negative
ones while conserving total edge length; the unnormalized variant drops
the conservation term. Integration stops at the horizon, at convergence,
or at the first surgery condition; surgery itself lives elsewhere.

Curvature is re-evaluated with fresh LPs at every integrator stage; there
is no stale-curvature shortcut.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .curvature import DIST_TOL, Gamma, edge_curvatures, lly_curvature_lp
from .errors import DistanceConditionViolated, StepUnderflow
from .graph import all_pairs_distances

EVENT_DIST_TOL = 1e-12  # condition (I): weight exceeds alternative path by this
# RHS evaluations during trial stages tolerate a slightly stale distance
# condition so that the boundary check (at EVENT_DIST_TOL) fires first.
RHS_DIST_TOL = 1e-9

CONDITION_I_NOTE = (
    "condition (I) reads w_uv > d(u,v); an edge can never exceed the "
    "distance it itself realizes, so d is taken as the best alternative "
    "path (shortest path in G minus the edge), the only reading that can "
    "trigger"
)


@dataclass(frozen=True)
class FlowState:
    t: float
    w: np.ndarray


@dataclass
class FlowConfig:
    mode: str = "normalized"       # normalized | unnormalized
    gamma: Gamma = field(default_factory=Gamma.reciprocal)
    integrator: str = "rk4"        # euler | rk4 | rk45
    h: float = 1e-3
    mt: float = 1e-3               # merge threshold for condition (II)
    renormalize: bool = False      # rescale to total weight 1 after surgery
    horizon: float = 10.0
    conv_tol: float = 1e-10
    conv_steps: int = 10
    rtol: float = 1e-9             # rk45 error control
    atol: float = 1e-12
    max_step: float = 1.0          # rk45 step-size cap
    max_halvings: int = 40
    # Project each accepted state back onto the total-weight-1 manifold.
    # The exact normalized flow conserves the total, but the manifold is
    # dynamically unstable (drift grows like exp(t * sum kappa w)), so long
    # horizons need the projection; it is the per-iteration re-normalization
    # the flow's conservation argument allows.
    conserve_total: bool = False

    def __post_init__(self):
        if self.mode not in ("normalized", "unnormalized"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.integrator not in ("euler", "rk4", "rk45"):
            raise ValueError(f"unknown integrator {self.integrator!r}")
        if self.h <= 0 or self.mt <= 0 or self.horizon <= 0:
            raise ValueError("h, mt, and horizon must be positive")
        if self.max_step <= 0:
            raise ValueError("max_step must be positive")


def _eval(g, gamma, w, mode, dist_tol):
    """Derivative vector and per-edge curvatures at weight vector w."""
    snapshot = g.with_weights(w)
    dist = all_pairs_distances(snapshot)
    kappa = edge_curvatures(snapshot, gamma, dist, dist_tol)
    if mode == "normalized":
        deriv = -kappa * w + w * float(kappa @ w)
    else:
        deriv = -kappa * w
    return deriv, kappa


def rhs_normalized(g, gamma, w, dist_tol=DIST_TOL):
    """dw_e/dt = -kappa_e w_e + w_e sum_h kappa_h w_h."""
    return _eval(g, gamma, np.asarray(w, float), "normalized", dist_tol)[0]


def rhs_unnormalized(g, gamma, w, dist_tol=DIST_TOL):
    """dw_e/dt = -kappa_e w_e."""
    return _eval(g, gamma, np.asarray(w, float), "unnormalized", dist_tol)[0]


def total_weight(w):
    """Total edge length; conserved by the normalized flow before surgery."""
    return float(np.sum(w))


# Dormand-Prince 5(4) tableau
_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_DP_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_DP_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640,
                   -92097 / 339200, 187 / 2100, 1 / 40])


class _Stepper:
    """One-trajectory integrator keeping the first-stage cache and, for the
    embedded pair, the adapted step size."""

    def __init__(self, g, config):
        self.g = g
        self.config = config
        self.h = config.h
        self.k0 = None  # rhs at the current state (FSAL / convergence reuse)

    def rhs(self, w):
        return _eval(self.g, self.config.gamma, w, self.config.mode,
                     RHS_DIST_TOL)[0]

    def _stages_fixed(self, state, h):
        """Euler/RK4 increment; raises if a stage leaves the positive cone."""
        w, cfg = state.w, self.config
        if self.k0 is None:
            self.k0 = self.rhs(w)
        if cfg.integrator == "euler":
            return h * self.k0
        k1 = self.k0

        def stage(trial):
            if (trial <= 0).any():
                raise _StagePositivity
            return self.rhs(trial)

        k2 = stage(w + 0.5 * h * k1)
        k3 = stage(w + 0.5 * h * k2)
        k4 = stage(w + h * k3)
        return h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)

    def _step_fixed(self, state):
        cfg = self.config
        h = min(self.h, cfg.h)
        for _ in range(cfg.max_halvings + 1):
            try:
                dw = self._stages_fixed(state, h)
            except (_StagePositivity, DistanceConditionViolated):
                h *= 0.5
                continue
            w_new = state.w + dw
            if (w_new > 0).all():
                self.k0 = None
                return FlowState(state.t + h, w_new)
            h *= 0.5
        raise StepUnderflow(f"positivity lost at t={state.t:g}")

    def _step_rk45(self, state):
        cfg = self.config
        w = state.w
        h = min(self.h, cfg.max_step)
        if self.k0 is None:
            self.k0 = self.rhs(w)
        for _ in range(cfg.max_halvings + 1):
            ks = [self.k0]
            try:
                for i in range(1, 7):
                    trial = w + h * sum(a * k for a, k in zip(_DP_A[i], ks))
                    if (trial <= 0).any():
                        raise _StagePositivity
                    ks.append(self.rhs(trial))
            except (_StagePositivity, DistanceConditionViolated):
                h *= 0.5
                continue
            w5 = w + h * sum(b * k for b, k in zip(_DP_B5, ks))
            w4 = w + h * sum(b * k for b, k in zip(_DP_B4, ks))
            scale = cfg.atol + cfg.rtol * np.maximum(np.abs(w), np.abs(w5))
            err = float(np.sqrt(np.mean(((w5 - w4) / scale) ** 2)))
            if err <= 1.0 and (w5 > 0).all():
                factor = 5.0 if err == 0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
                self.h = min(h * factor, cfg.max_step)
                self.k0 = ks[6]  # FSAL: last stage sits at the new state
                return FlowState(state.t + h, w5)
            h *= 0.5 if (w5 <= 0).any() else max(0.2, 0.9 * err ** -0.2)
        raise StepUnderflow(f"error control failed at t={state.t:g}")

    def step(self, state, h_cap=None):
        saved = self.h
        if h_cap is not None:
            self.h = min(self.h, h_cap)
        try:
            if self.config.integrator == "rk45":
                return self._step_rk45(state)
            return self._step_fixed(state)
        finally:
            if h_cap is not None and self.config.integrator != "rk45":
                self.h = saved


class _StagePositivity(Exception):
    pass


def step(state, config, g):
    """One accepted integrator step from `state`."""
    return _Stepper(g, config).step(state)


@dataclass
class FlowTrajectory:
    """Sampled weights/curvatures of one integration segment."""

    edges: tuple
    times: np.ndarray
    weights: np.ndarray     # samples x edges
    kappas: np.ndarray
    stop_reason: str        # horizon | converged | event
    event: tuple | None     # (kind, (u, v)) at times[-1]
    final_max_rate: float
    metadata: dict

    def drifts(self):
        """Per-sample F_e = sum kappa w - kappa_e."""
        return (self.kappas * self.weights).sum(axis=1, keepdims=True) - self.kappas

    def to_csv(self, fh=None):
        out = fh or io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["t", "edge_u", "edge_v", "w", "kappa"])
        for i, t in enumerate(self.times):
            for j, (u, v) in enumerate(self.edges):
                writer.writerow([f"{t:.12g}", u, v,
                                 f"{self.weights[i, j]:.17g}",
                                 f"{self.kappas[i, j]:.17g}"])
        if fh is None:
            return out.getvalue()

    def events_json(self):
        events = []
        if self.event is not None:
            kind, (u, v) = self.event
            events.append({"t": float(self.times[-1]), "kind": kind,
                           "u": u, "v": v})
        return {"events": events, "metadata": self.metadata}


def _check_conditions(g, w, dist, mt):
    """First violating edge in lexicographic order, condition (I) first."""
    edges = g.edge_list
    for j, (u, v) in enumerate(edges):
        if w[j] - dist.d(u, v) > EVENT_DIST_TOL:
            return ("delete", (u, v))
    for j, (u, v) in enumerate(edges):
        if w[j] < mt:
            return ("contract", (u, v))
    return None


def integrate(g, config):
    """Run one flow segment until horizon, convergence, or the first event."""
    edges = g.edge_list
    state = FlowState(0.0, g.weight_vector())
    stepper = _Stepper(g, config)

    times, weights, kappas = [], [], []
    conv_run = 0
    stop = "horizon"
    event = None
    max_rate = np.inf

    def sample(w):
        snapshot = g.with_weights(w)
        dist = all_pairs_distances(snapshot)
        hit = _check_conditions(snapshot, w, dist, config.mt)
        if hit is None:
            kap = edge_curvatures(snapshot, config.gamma, dist, RHS_DIST_TOL)
        else:
            # curvature is undefined on an edge past its alternative path;
            # record what is still defined and NaN for the violating edge
            kap = np.empty(len(edges))
            for j, e in enumerate(edges):
                try:
                    kap[j] = lly_curvature_lp(snapshot, config.gamma, e, dist,
                                              RHS_DIST_TOL)
                except DistanceConditionViolated:
                    kap[j] = np.nan
        if config.mode == "normalized":
            deriv = -kap * w + w * float(np.nan_to_num(kap) @ w)
        else:
            deriv = -kap * w
        if hit is None:
            stepper.k0 = deriv  # the next stage-0 evaluation, reused via FSAL
        times.append(state.t)
        weights.append(w.copy())
        kappas.append(kap)
        return float(np.nanmax(np.abs(deriv))), hit

    # target for the per-step projection: the flow conserves whatever the
    # initial total is, so the projection rescales back to it
    target = (float(state.w.sum())
              if config.conserve_total and config.mode == "normalized" else None)

    max_rate, hit = sample(state.w)
    if hit is not None:
        stop, event = "event", hit
    else:
        while state.t < config.horizon - 1e-12:
            state = stepper.step(state, h_cap=config.horizon - state.t)
            if target is not None:
                state = FlowState(state.t, state.w * (target / state.w.sum()))
            max_rate, hit = sample(state.w)
            if hit is not None:
                stop, event = "event", hit
                break
            if max_rate < config.conv_tol:
                conv_run += 1
                if conv_run >= config.conv_steps:
                    stop = "converged"
                    break
            else:
                conv_run = 0

    return FlowTrajectory(
        edges=edges,
        times=np.array(times),
        weights=np.array(weights),
        kappas=np.array(kappas),
        stop_reason=stop,
        event=event,
        final_max_rate=max_rate,
        metadata={
            "mode": config.mode,
            "gamma": config.gamma.name,
            "integrator": config.integrator,
            "h": config.h,
            "mt": config.mt,
            "conserve_total": config.conserve_total,
            "condition_I_interpretation": CONDITION_I_NOTE,
        },
    )
