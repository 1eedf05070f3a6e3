#!/usr/bin/env python3
"""
Linear programming kernels for the time-allocation subproblems

Both the intra-cluster TAP and the inter-cluster time step reduce to
``min c.x  s.t.  0 <= x <= cap, sum(x) <= budget``. ``solve_box_budget``
solves that structure greedily; ``simplex_minimize`` is a small dense
tableau simplex for general ``A x <= b, x >= 0`` problems with b >= 0 and
serves as the cross-check solver and fallback.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ..core.errors import DomainError, NumericalFailure

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LPResult:
    x: np.ndarray
    objective: float
    iterations: int = 0


def solve_box_budget(coefficients: Sequence[float], caps: Sequence[float], budget: float) -> LPResult:
    """Greedy optimum of the box-and-budget LP

    Variables are filled in ascending coefficient order (ties by index) while
    their coefficient is negative, each up to its cap, until the budget runs out.
    ``budget`` may be ``math.inf``.
    """
    c = np.asarray(coefficients, dtype=float)
    u = np.asarray(caps, dtype=float)
    if c.shape != u.shape:
        raise DomainError("coefficient and cap vectors must have equal length")
    if budget < 0 or np.any(u < 0):
        raise DomainError("budget and caps must be >= 0")
    x = np.zeros_like(c)
    remaining = budget
    for index in np.argsort(c, kind="stable"):
        if c[index] >= 0 or remaining <= 0:
            break
        x[index] = min(u[index], remaining)
        remaining -= x[index]
    return LPResult(x=x, objective=float(c @ x))


def box_budget_matrices(caps: Sequence[float], budget: float):
    """(A_ub, b_ub) of the box-and-budget LP; the budget row is left out when infinite"""
    n = len(caps)
    rows = [np.eye(n)]
    rhs = [np.asarray(caps, dtype=float)]
    if math.isfinite(budget):
        rows.insert(0, np.ones((1, n)))
        rhs.insert(0, np.array([budget], dtype=float))
    return np.vstack(rows), np.concatenate(rhs)


def simplex_minimize(c: Sequence[float], a_ub, b_ub: Sequence[float],
                     max_iterations: Optional[int] = None, tol: float = 1e-12) -> LPResult:
    """Minimise c.x subject to A x <= b, x >= 0 with a dense tableau

    The slack basis is the starting vertex, so b must be non-negative. Bland's
    rule picks entering and leaving variables, which rules out cycling.
    """
    cost = np.asarray(c, dtype=float)
    a = np.atleast_2d(np.asarray(a_ub, dtype=float))
    b = np.asarray(b_ub, dtype=float)
    m, n = a.shape
    if cost.shape != (n,) or b.shape != (m,):
        raise DomainError("LP dimensions do not agree")
    if np.any(b < 0):
        raise DomainError("right-hand side must be >= 0 for a slack starting basis")
    limit = max_iterations if max_iterations is not None else 50 * (m + n) + 100

    tableau = np.zeros((m + 1, n + m + 1))
    tableau[0, :n] = cost
    tableau[1:, :n] = a
    tableau[1:, n:n + m] = np.eye(m)
    tableau[1:, -1] = b
    basis = list(range(n, n + m))

    iterations = 0
    while True:
        entering = next((j for j in range(n + m) if tableau[0, j] < -tol), None)
        if entering is None:
            break
        if iterations >= limit:
            raise NumericalFailure(f"simplex did not terminate within {limit} pivots")
        column = tableau[1:, entering]
        leaving_row = None
        best_ratio = math.inf
        for row in range(m):
            if column[row] > tol:
                ratio = tableau[row + 1, -1] / column[row]
                if ratio < best_ratio - tol or (abs(ratio - best_ratio) <= tol and leaving_row is not None
                                                and basis[row] < basis[leaving_row]):
                    best_ratio = ratio
                    leaving_row = row
        if leaving_row is None:
            raise NumericalFailure(f"LP is unbounded along variable {entering}")

        pivot = leaving_row + 1
        tableau[pivot] /= tableau[pivot, entering]
        for row in range(m + 1):
            if row != pivot and tableau[row, entering] != 0.0:
                tableau[row] -= tableau[row, entering] * tableau[pivot]
        basis[leaving_row] = entering
        iterations += 1

    x = np.zeros(n + m)
    for row, variable in enumerate(basis):
        x[variable] = tableau[row + 1, -1]
    solution = np.clip(x[:n], 0.0, None)
    logger.debug("simplex finished after %d pivots", iterations)
    return LPResult(x=solution, objective=float(cost @ solution), iterations=iterations)


def solve_box_budget_simplex(coefficients: Sequence[float], caps: Sequence[float], budget: float) -> LPResult:
    """Box-and-budget LP through the general simplex"""
    caps = np.asarray(caps, dtype=float)
    if caps.size == 0:
        return LPResult(x=np.zeros(0), objective=0.0)
    a_ub, b_ub = box_budget_matrices(caps, budget)
    return simplex_minimize(coefficients, a_ub, b_ub)
