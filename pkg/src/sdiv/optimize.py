"""Grid-plus-golden-section maximization of unimodal functions on an interval."""

from __future__ import annotations

import math
from typing import Callable, NamedTuple

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


class Maximum(NamedTuple):
    argmax: float
    value: float
    grid_value: float


def golden_max(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-10, max_iter: int = 200):
    """Golden-section search for the max of a unimodal ``f`` on ``[lo, hi]``."""
    x1 = hi - INV_PHI * (hi - lo)
    x2 = lo + INV_PHI * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + INV_PHI * (hi - lo)
            f2 = f(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - INV_PHI * (hi - lo)
            f1 = f(x1)
    if f1 >= f2:
        return x1, f1
    return x2, f2


def grid_golden_max(
    f_vec: Callable[[np.ndarray], np.ndarray],
    lo: float,
    hi: float,
    points: int = 1025,
    tol: float = 1e-10,
) -> Maximum:
    """Maximize ``f`` on ``[lo, hi]``.

    ``f_vec`` maps an array of abscissas to values. The best grid point is
    refined by golden section inside its two neighbouring cells; the result
    never falls below the grid maximum.
    """
    xs = np.linspace(lo, hi, points)
    return refine_grid_max(f_vec, xs, f_vec(xs), tol)


def refine_grid_max(f_vec, xs: np.ndarray, ys: np.ndarray, tol: float = 1e-10) -> Maximum:
    """Golden-section refinement around the best of precomputed grid values ``ys``."""
    k = int(np.nanargmax(ys))
    grid_x, grid_y = float(xs[k]), float(ys[k])
    a = float(xs[max(k - 1, 0)])
    b = float(xs[min(k + 1, xs.size - 1)])

    def f(x):
        return float(f_vec(np.array([x]))[0])

    x, y = golden_max(f, a, b, tol)
    if not y >= grid_y:
        x, y = grid_x, grid_y
    return Maximum(x, y, grid_y)
