"""Composite Gauss-Legendre grids for exponentially damped kernels.

The integrands behave like poly(y) * exp(-y) on [0, inf) with, at worst, a
y*log(y) endpoint at zero (unit reflectivity at zero frequency). A geometric
panel ladder toward the origin handles the log endpoint to well below the
1e-10 target; the tail is cut at T_MAX where exp(-y) ~ 9e-27.

Two grids are kept: FINE (ratio-2 panels) used for the result, and COARSE
(panels merged pairwise) used only to estimate the quadrature residual.
"""
from __future__ import annotations

import numpy as np
from numpy.polynomial.legendre import leggauss

T_MAX = 60.0
_GRADE_DEPTH = 40
_GL_ORDER = 20


def _composite(breaks: np.ndarray, order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = leggauss(order)
    nodes, weights = [], []
    for a, b in zip(breaks[:-1], breaks[1:]):
        half = 0.5 * (b - a)
        nodes.append(0.5 * (a + b) + half * x)
        weights.append(half * w)
    return np.ascontiguousarray(np.concatenate(nodes)), np.ascontiguousarray(
        np.concatenate(weights)
    )


def graded_grid(
    tmax: float = T_MAX,
    depth: int = _GRADE_DEPTH,
    order: int = _GL_ORDER,
    stride: int = 1,
) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/weights on [0, tmax] with panels shrinking geometrically to 0."""
    exponents = list(range(depth, -1, -stride))
    if exponents[-1] != 0:
        exponents.append(0)
    breaks = np.array([0.0] + [tmax * 2.0 ** (-j) for j in exponents])
    return _composite(breaks, order)


FINE: tuple[np.ndarray, np.ndarray] = graded_grid(stride=1)
COARSE: tuple[np.ndarray, np.ndarray] = graded_grid(stride=2)
