"""Independent reference computations used by the tests.

Nothing here calls into the package's solvers: integrals go through
scipy.integrate.quad and searches are plain enumerations.
"""

import itertools

import numpy as np
from scipy.integrate import quad


def sigma_quartic(a: float) -> float:
    """Distance between the wells of (u^2 - a^2)^2: ∫ 2 (a^2 - s^2) ds over [-a, a]."""
    return quad(lambda s: 2.0 * (a * a - s * s), -a, a)[0]


def scalar_distance(density, p: float, q: float, breaks=()) -> float:
    lo, hi = sorted((p, q))
    pts = [b for b in breaks if lo < b < hi]
    return quad(lambda s: 2.0 * np.sqrt(max(density(s), 0.0)), lo, hi, points=pts or None,
                limit=200)[0]


def polyline_energy(density, vertices, per_segment: int = 400) -> float:
    """Midpoint rule of 2 sqrt(W) |γ'| with many sub-points per segment."""
    total = 0.0
    for a, b in zip(vertices[:-1], vertices[1:]):
        a, b = np.asarray(a, float), np.asarray(b, float)
        t = (np.arange(per_segment) + 0.5) / per_segment
        pts = a + t[:, None] * (b - a)
        total += np.sum(2.0 * np.sqrt(np.maximum(density(pts), 0.0))) \
            * np.linalg.norm(b - a) / per_segment
    return float(total)


def brute_force_three_vertex(density, p, q, lo=-2.0, hi=2.0, n=41, per_segment=200):
    """Exhaustive minimum over polylines p -> v -> q with v on an n x n grid.

    Returns (energy, best middle vertex).
    """
    axis = np.linspace(lo, hi, n)
    best, arg = np.inf, None
    for v in itertools.product(axis, repeat=2):
        e = polyline_energy(density, [p, v, q], per_segment)
        if e < best:
            best, arg = e, np.array(v)
    return best, arg


def central_difference(fun, u, v, t):
    return (fun(u + t * v) - fun(u - t * v)) / (2.0 * t)
