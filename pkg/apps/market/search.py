"""
One-dimensional maximization shared by the best responses, the bargaining
search and the sensing benchmark: a dense grid scan followed by a bounded
scalar refinement on the cells around the best grid point.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar


@dataclass(frozen=True)
class SearchResult:
    x: float
    value: float
    grid: np.ndarray
    values: np.ndarray
    index: int


def _finite(values):
    values = np.asarray(values, dtype=float)
    return np.where(np.isfinite(values), values, -np.inf)


def _stationary_point(derivative, left, right):
    with np.errstate(all='ignore'):
        slope_left, slope_right = float(derivative(left)), float(derivative(right))
        if slope_left == np.inf:
            left = left + 1e-9 * (right - left)
            slope_left = float(derivative(left))
    if not (np.isfinite(slope_left) and np.isfinite(slope_right)):
        return None
    if slope_left > 0 > slope_right:
        with np.errstate(all='ignore'):
            return brentq(derivative, left, right, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    return None


def grid_maximize(objective, lower, upper, points, vectorized=True, xatol=1e-12, derivative=None):
    """
    Maximize `objective` on [lower, upper].

    With `vectorized` the objective is called once on the whole grid;
    otherwise point by point. Non-finite values count as -inf. The refined
    point replaces the grid point only when it is at least as good. Bounded
    refinement stalls near sqrt(machine eps) on a flat maximum, so a known
    `derivative` polishes interior maxima to its root.
    """
    if upper < lower:
        raise ValueError(f'empty search interval [{lower}, {upper}]')
    if upper - lower <= xatol:
        value = float(objective(np.array([lower]))[0]) if vectorized else float(objective(lower))
        return SearchResult(float(lower), value, np.array([lower]), np.array([value]), 0)

    grid = np.linspace(lower, upper, max(int(points), 3))
    if vectorized:
        values = _finite(objective(grid))
    else:
        values = _finite([objective(float(x)) for x in grid])
    index = int(np.argmax(values))
    best_x, best_value = float(grid[index]), float(values[index])

    if np.isfinite(best_value):
        left = grid[max(index - 1, 0)]
        right = grid[min(index + 1, grid.size - 1)]

        def negated(x):
            value = objective(np.array([x]))[0] if vectorized else objective(x)
            return -value if np.isfinite(value) else np.inf

        refined = minimize_scalar(negated, bounds=(left, right), method='bounded',
                                  options={'xatol': xatol})
        if refined.success and -refined.fun >= best_value:
            best_x, best_value = float(refined.x), float(-refined.fun)

        if derivative is not None:
            root = _stationary_point(derivative, left, right)
            if root is not None:
                value = -negated(root)
                if value >= best_value - 1e-12 * max(1.0, abs(best_value)):
                    best_x, best_value = float(root), float(value)

    return SearchResult(best_x, best_value, grid, values, index)
