#!/usr/bin/env python3
"""
Greedy box-and-budget LP against the dense simplex and HiGHS
"""

import math

import numpy as np
import pytest
from scipy.optimize import linprog

from crsnsim.core.errors import DomainError, NumericalFailure
from crsnsim.optim.lp import box_budget_matrices, simplex_minimize, solve_box_budget, solve_box_budget_simplex


def test_greedy_fills_cheapest_first():
    result = solve_box_budget([-3.0, -1.0, 2.0], [1.0, 5.0, 1.0], 3.0)
    assert result.x.tolist() == [1.0, 2.0, 0.0]
    assert result.objective == -5.0


def test_greedy_with_unbounded_budget():
    result = solve_box_budget([-3.0, -1.0, 2.0], [1.0, 5.0, 1.0], math.inf)
    assert result.x.tolist() == [1.0, 5.0, 0.0]


def test_greedy_breaks_ties_by_index():
    result = solve_box_budget([-1.0, -1.0], [2.0, 2.0], 1.0)
    assert result.x.tolist() == [1.0, 0.0]


def test_greedy_rejects_bad_input():
    with pytest.raises(DomainError):
        solve_box_budget([-1.0], [1.0, 2.0], 1.0)
    with pytest.raises(DomainError):
        solve_box_budget([-1.0], [1.0], -1.0)


def test_budget_row_dropped_when_infinite():
    a, b = box_budget_matrices([1.0, 2.0], math.inf)
    assert a.shape == (2, 2)
    a, b = box_budget_matrices([1.0, 2.0], 3.0)
    assert a.shape == (3, 2) and b[0] == 3.0


def test_simplex_textbook_problem():
    result = simplex_minimize([-1.0, -1.0], [[1.0, 2.0], [3.0, 1.0]], [4.0, 6.0])
    assert result.x == pytest.approx([1.6, 1.2])
    assert result.objective == pytest.approx(-2.8)


def test_simplex_unbounded_and_bad_rhs():
    with pytest.raises(NumericalFailure):
        simplex_minimize([-1.0, 0.0], [[0.0, 1.0]], [1.0])
    with pytest.raises(DomainError):
        simplex_minimize([-1.0], [[1.0]], [-1.0])


def test_greedy_matches_simplex_and_highs():
    rng = np.random.default_rng(42)
    for _ in range(200):
        n = int(rng.integers(1, 11))
        c = rng.normal(0.0, 1.0, n)
        caps = rng.uniform(0.0, 0.05, n)
        budget = float(rng.uniform(0.0, 0.2))
        greedy = solve_box_budget(c, caps, budget).objective
        simplex = solve_box_budget_simplex(c, caps, budget).objective
        a, b = box_budget_matrices(caps, budget)
        highs = linprog(c, A_ub=a, b_ub=b, bounds=[(0, None)] * n, method="highs").fun
        scale = max(abs(greedy), 1e-12)
        assert abs(greedy - simplex) <= 1e-9 * scale
        assert abs(greedy - highs) <= 1e-7 * scale + 1e-12
