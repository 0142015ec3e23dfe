"""Dense two-phase simplex for small linear programs.

Solves   max (or min)  c.x   s.t.  A_ub x <= b_ub,  A_eq x = b_eq,  x >= 0
entirely in dense numpy tableaus.  Pivoting uses Bland's rule (lowest
eligible index enters, lowest basic index leaves on ratio ties), which rules
out cycling on the degenerate programs that equilibrium polytopes produce.
Intended for desk-scale problems (tens of variables), not as a general LP
package.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_TOL = 1e-9
_MAX_PIVOTS = 20000


@dataclass
class LpResult:
    status: str
    x: np.ndarray | None
    value: float | None


def _pivot(tableau, cost, basis, row, col):
    tableau[row] /= tableau[row, col]
    for r in range(tableau.shape[0]):
        if r != row and tableau[r, col] != 0.0:
            tableau[r] -= tableau[r, col] * tableau[row]
    if cost[col] != 0.0:
        cost -= cost[col] * tableau[row]
    basis[row] = col


def _run_simplex(tableau, cost, basis, allowed):
    """Minimize cost over the tableau; returns status.

    `allowed` masks columns eligible to enter the basis (artificials are
    barred in phase two).  Bland's rule: the entering column is the lowest
    allowed index with a negative reduced cost; the leaving row minimizes the
    ratio with ties broken by the lowest basic variable index.
    """
    m = tableau.shape[0]
    for _ in range(_MAX_PIVOTS):
        enter = -1
        for j in range(tableau.shape[1] - 1):
            if allowed[j] and cost[j] < -_TOL:
                enter = j
                break
        if enter < 0:
            return OPTIMAL
        leave = -1
        best_ratio = np.inf
        for r in range(m):
            a = tableau[r, enter]
            if a > _TOL:
                ratio = tableau[r, -1] / a
                if ratio < best_ratio - _TOL or (
                    abs(ratio - best_ratio) <= _TOL and (leave < 0 or basis[r] < basis[leave])
                ):
                    best_ratio = ratio
                    leave = r
        if leave < 0:
            return UNBOUNDED
        _pivot(tableau, cost, basis, leave, enter)
    raise ArithmeticError("simplex failed to terminate within the pivot cap")


def solve_lp(c, a_ub=None, b_ub=None, a_eq=None, b_eq=None, maximize=False) -> LpResult:
    """Solve a small dense LP; see module docstring for the standard form."""
    c = np.asarray(c, dtype=float)
    n = c.shape[0]
    rows = []
    rhs = []
    n_ub = 0
    if a_ub is not None:
        a_ub = np.atleast_2d(np.asarray(a_ub, dtype=float))
        b_ub = np.atleast_1d(np.asarray(b_ub, dtype=float))
        n_ub = a_ub.shape[0]
        rows.append(a_ub)
        rhs.append(b_ub)
    if a_eq is not None:
        a_eq = np.atleast_2d(np.asarray(a_eq, dtype=float))
        b_eq = np.atleast_1d(np.asarray(b_eq, dtype=float))
        rows.append(a_eq)
        rhs.append(b_eq)
    if not rows:
        raise ValueError("an LP needs at least one constraint row")
    a = np.vstack(rows)
    b = np.concatenate(rhs)
    m = a.shape[0]
    if a.shape[1] != n:
        raise ValueError("constraint width does not match the objective length")

    # Equality form with slacks on the <= rows, then flip rows to b >= 0.
    full = np.zeros((m, n + n_ub))
    full[:, :n] = a
    for i in range(n_ub):
        full[i, n + i] = 1.0
    flip = b < 0
    full[flip] *= -1.0
    b = np.where(flip, -b, b)

    # Rows that kept a +1 slack start basic on it; the rest take artificials.
    needs_art = [i for i in range(m) if i >= n_ub or flip[i]]
    n_cols = n + n_ub + len(needs_art)
    tableau = np.zeros((m, n_cols + 1))
    tableau[:, : n + n_ub] = full
    tableau[:, -1] = b
    basis = np.empty(m, dtype=int)
    for i in range(m):
        basis[i] = n + i if i < n_ub and not flip[i] else -1
    for k, i in enumerate(needs_art):
        col = n + n_ub + k
        tableau[i, col] = 1.0
        basis[i] = col

    allowed = np.ones(n_cols, dtype=bool)

    if needs_art:
        phase1 = np.zeros(n_cols + 1)
        phase1[n + n_ub :][: len(needs_art)] = 1.0
        for i in needs_art:
            phase1 -= tableau[i]  # price out the artificial basis
        status = _run_simplex(tableau, phase1, basis, allowed)
        if status != OPTIMAL or -phase1[-1] > 1e-7:
            return LpResult(INFEASIBLE, None, None)
        # Drive any zero-level artificial out of the basis; a row with no
        # real pivot left is redundant and harmlessly keeps its artificial
        # pinned at zero (its column is barred from re-entering below).
        for r in range(m):
            if basis[r] >= n + n_ub:
                for j in range(n + n_ub):
                    if abs(tableau[r, j]) > _TOL:
                        _pivot(tableau, phase1, basis, r, j)
                        break
        allowed[n + n_ub :] = False

    sign = -1.0 if maximize else 1.0
    cost = np.zeros(n_cols + 1)
    cost[:n] = sign * c
    for r in range(m):
        if cost[basis[r]] != 0.0:
            cost -= cost[basis[r]] * tableau[r]
    status = _run_simplex(tableau, cost, basis, allowed)
    if status == UNBOUNDED:
        return LpResult(UNBOUNDED, None, None)

    x = np.zeros(n_cols)
    x[basis] = tableau[:, -1]
    x = x[:n]
    value = float(c @ x)
    return LpResult(OPTIMAL, x, value)
