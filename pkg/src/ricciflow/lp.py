"""Dense two-phase simplex for the small linear programs this package needs.

The curvature and transport LPs have at most a few dozen variables, where a
dense tableau beats a general-purpose solver on per-call overhead. Bland's
rule guards against cycling on the degenerate transportation bases.
"""

from __future__ import annotations

import numpy as np

from .errors import Infeasible, Unbounded

# pivot / feasibility tolerances; optimality is accurate to ~1e-9 at this scale
PIVOT_EPS = 1e-9
FEAS_EPS = 1e-7


def _pivot(T, basis, row, col):
    T[row] /= T[row, col]
    colvals = T[:, col].copy()
    colvals[row] = 0.0
    T -= np.outer(colvals, T[row])
    T[:, col] = 0.0
    T[row, col] = 1.0
    basis[row] = col


def _run_simplex(T, basis, usable):
    """Pivot until the reduced costs over `usable` columns are nonnegative."""
    m = T.shape[0] - 1
    while True:
        reduced = T[-1, :usable]
        candidates = np.flatnonzero(reduced < -PIVOT_EPS)
        if candidates.size == 0:
            return
        enter = int(candidates[0])  # Bland: lowest eligible index
        col = T[:m, enter]
        rhs = T[:m, -1]
        rows = np.flatnonzero(col > PIVOT_EPS)
        if rows.size == 0:
            raise Unbounded("objective unbounded below")
        ratios = rhs[rows] / col[rows]
        best = ratios.min()
        ties = rows[ratios <= best + 1e-12]
        leave = int(ties[np.argmin([basis[i] for i in ties])])
        _pivot(T, basis, leave, enter)


def solve_lp(c, a_ub=None, b_ub=None, a_eq=None, b_eq=None, nonneg=False):
    """Minimize c @ x subject to a_ub @ x <= b_ub and a_eq @ x == b_eq.

    Variables are free unless `nonneg` is set. Returns (optimum, argmin).
    Raises Infeasible or Unbounded.
    """
    c = np.asarray(c, dtype=float)
    n = c.size
    a_ub = np.zeros((0, n)) if a_ub is None else np.atleast_2d(np.asarray(a_ub, float))
    b_ub = np.zeros(0) if b_ub is None else np.atleast_1d(np.asarray(b_ub, float))
    a_eq = np.zeros((0, n)) if a_eq is None else np.atleast_2d(np.asarray(a_eq, float))
    b_eq = np.zeros(0) if b_eq is None else np.atleast_1d(np.asarray(b_eq, float))
    if not (np.isfinite(a_ub).all() and np.isfinite(b_ub).all()
            and np.isfinite(a_eq).all() and np.isfinite(b_eq).all()
            and np.isfinite(c).all()):
        raise ValueError("non-finite LP coefficients")

    if n == 0:
        if (b_ub < -FEAS_EPS).any() or (np.abs(b_eq) > FEAS_EPS).any():
            raise Infeasible("constant constraints violated")
        return 0.0, np.zeros(0)

    # free variables split as x = p - q
    if nonneg:
        split = 1
    else:
        split = 2
        c = np.concatenate([c, -c])
        a_ub = np.hstack([a_ub, -a_ub]) if a_ub.size else np.zeros((0, 2 * n))
        a_eq = np.hstack([a_eq, -a_eq]) if a_eq.size else np.zeros((0, 2 * n))

    nv = split * n
    m_ub, m_eq = a_ub.shape[0], a_eq.shape[0]
    m = m_ub + m_eq

    # rows: [a_ub | slacks] then [a_eq | 0], all with rhs >= 0
    A = np.zeros((m, nv + m_ub))
    rhs = np.zeros(m)
    slack_ok = np.zeros(m, dtype=bool)  # slack usable as the initial basis
    for i in range(m_ub):
        row, bi = a_ub[i], b_ub[i]
        if bi < 0:
            row, bi = -row, -bi
            A[i, :nv] = row
            A[i, nv + i] = -1.0
        else:
            A[i, :nv] = row
            A[i, nv + i] = 1.0
            slack_ok[i] = True
        rhs[i] = bi
    for k in range(m_eq):
        i = m_ub + k
        row, bi = a_eq[k], b_eq[k]
        if bi < 0:
            row, bi = -row, -bi
        A[i, :nv] = row
        rhs[i] = bi

    need_art = np.flatnonzero(~slack_ok)
    n_art = need_art.size
    total = nv + m_ub + n_art

    T = np.zeros((m + 1, total + 1))
    T[:m, : nv + m_ub] = A
    T[:m, -1] = rhs
    basis = np.full(m, -1, dtype=int)
    for i in np.flatnonzero(slack_ok):
        basis[i] = nv + i
    for j, i in enumerate(need_art):
        T[i, nv + m_ub + j] = 1.0
        basis[i] = nv + m_ub + j

    if n_art:
        # phase 1: minimize the artificial total
        T[-1, nv + m_ub:total] = 1.0
        for i in need_art:
            T[-1] -= T[i]
        _run_simplex(T, basis, usable=total)
        if -T[-1, -1] > FEAS_EPS:
            raise Infeasible(f"phase-1 residual {-T[-1, -1]:.3e}")
        # drive leftover artificials out of the basis; drop redundant rows
        keep = np.ones(m, dtype=bool)
        for i in range(m):
            if basis[i] >= nv + m_ub:
                cols = np.flatnonzero(np.abs(T[i, : nv + m_ub]) > PIVOT_EPS)
                if cols.size:
                    _pivot(T, basis, i, int(cols[0]))
                else:
                    keep[i] = False
        if not keep.all():
            T = np.vstack([T[:m][keep], T[-1:]])
            basis = basis[keep]
            m = int(keep.sum())

    # phase 2 over the real objective; artificial columns locked out
    T[-1, :] = 0.0
    T[-1, :nv] = c
    for i in range(m):
        j = basis[i]
        if T[-1, j] != 0.0:
            T[-1] -= T[-1, j] * T[i]
    _run_simplex(T, basis, usable=nv + m_ub)

    x_full = np.zeros(total)
    x_full[basis[:m]] = T[:m, -1]
    if nonneg:
        x = x_full[:n]
    else:
        x = x_full[:n] - x_full[n: 2 * n]
    return float(-T[-1, -1]), x
