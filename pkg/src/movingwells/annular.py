"""Nested-annulus obstacle potential whose geodesics wind around every ring.

Ring ``n`` occupies ``1/(n+1) <= |u| <= 1/n`` and is split by its middle
circle into an outer and an inner band. Each band carries a wall of height
``M1`` except in a narrow gate sector: the outer gate points down
(angle -pi/2), the inner gate points up (angle +pi/2). Thin channels of low
value ``eps_n`` run along the three circles of each ring, so a cheap path
from the outer circle to the inner one has to travel half way around the
middle circle. The two wells sit at ``(0, 1)`` and at the origin.
"""

from __future__ import annotations

import numpy as np

from .domain import SpatialDomain
from .errors import ParameterError
from .potentials import GrowthFunction, Potential, WellField

CHANNEL = 0.3   # band fraction of the flat channel next to each circle
RAMP = 0.1      # band fraction of each linear ramp
WELL_RADIUS = 0.02
OUTER_SKIN = 0.05


class AnnularObstacleFamily:
    """Density of the annular construction; ignores the well field."""

    name = "annular"
    homogeneity = None

    def __init__(self, n_rings, level, eps, gate_width):
        self.n_rings = int(n_rings)
        self.level = float(level)
        self.eps = np.asarray(eps, dtype=float)
        self.gate_width = float(gate_width)
        self.top_well = np.array([0.0, 1.0])

    def radii(self, n):
        outer, inner = 1.0 / n, 1.0 / (n + 1)
        return outer, 0.5 * (outer + inner), inner

    def _band(self, rho, theta, r_in, r_out, v_in, v_out, gate_angle):
        width = r_out - r_in
        s = (rho - r_in) / width
        slit = v_in + (v_out - v_in) * s
        wall = np.interp(s, [0.0, CHANNEL, CHANNEL + RAMP, 1.0 - CHANNEL - RAMP, 1.0 - CHANNEL, 1.0],
                         [0.0, 0.0, 1.0, 1.0, 0.0, 0.0])
        wall_profile = np.where(s < 0.5,
                                v_in + (self.level - v_in) * wall,
                                v_out + (self.level - v_out) * wall)
        dist = np.abs(np.angle(np.exp(1j * (theta - gate_angle))))
        blend = np.clip((dist - self.gate_width) / self.gate_width, 0.0, 1.0)
        return (1.0 - blend) * slit + blend * wall_profile

    def density(self, u):
        u = np.asarray(u, dtype=float)
        rho = np.linalg.norm(u, axis=-1)
        theta = np.arctan2(u[..., 1], u[..., 0])
        out = np.empty(rho.shape)
        last_inner = 1.0 / (self.n_rings + 1)
        core = rho <= last_inner
        out[core] = self.eps[self.n_rings] * rho[core] / last_inner
        skin = rho >= 1.0
        out[skin] = np.interp(rho[skin], [1.0, 1.0 + OUTER_SKIN], [self.eps[0], self.level])
        for n in range(1, self.n_rings + 1):
            outer, mid, inner = self.radii(n)
            e_out, e_in = self.eps[n - 1], self.eps[n]
            m_out = (rho > mid) & (rho < outer)
            m_in = (rho > inner) & (rho <= mid)
            out[m_out] = self._band(rho[m_out], theta[m_out], mid, outer, e_out, e_out, -np.pi / 2)
            out[m_in] = self._band(rho[m_in], theta[m_in], inner, mid, e_in, e_out, np.pi / 2)
        out *= np.minimum(1.0, np.linalg.norm(u - self.top_well, axis=-1) / WELL_RADIUS)
        return out

    def value(self, u, a, c):
        return self.density(u)

    def grad(self, u, a, c):
        raise NotImplementedError("the annular obstacle potential is only used for geodesics")


def make_annular_potential(n_rings: int = 1, level: float = 1.0, eps=None,
                           gate_width: float = np.pi / 20) -> Potential:
    """Annular obstacle potential in the phase plane (M = 2).

    Parameters
    ----------
    n_rings : int
        Number of nested rings, ``n_rings >= 1``.
    level : float
        Obstacle height ``M1`` inside the walls.
    eps : sequence of float, optional
        Strictly decreasing channel values ``eps_1 > eps_2 > ...`` with at
        least ``n_rings + 1`` entries and ``eps_1 < level / 2``. Defaults to
        ``1e-4 * 4**-(n-1)``.
    gate_width : float
        Angular half-width of each gate, below ``pi/16``.
    """
    if n_rings < 1:
        raise ParameterError("n_rings must be >= 1")
    if eps is None:
        eps = 1e-4 * 4.0 ** -np.arange(n_rings + 1)
    eps = np.asarray(eps, dtype=float)
    if eps.size < n_rings + 1:
        raise ParameterError(f"need {n_rings + 1} channel values, got {eps.size}")
    if np.any(eps <= 0) or np.any(np.diff(eps) >= 0):
        raise ParameterError("channel values must be positive and strictly decreasing")
    if eps[0] >= level / 2:
        raise ParameterError("first channel value must be below half the obstacle level")
    if not (0 < gate_width < np.pi / 16):
        raise ParameterError("gate width must lie in (0, pi/16)")
    family = AnnularObstacleFamily(n_rings, level, eps[: n_rings + 1], gate_width)
    domain = SpatialDomain([0.0], [1.0])
    wells = WellField(domain, [lambda x: np.array([0.0, 0.5])], M=2,
                      center=lambda x: np.array([0.0, 0.5]),
                      description="annular wells (0,0) and (0,1)")
    growth = GrowthFunction(lambda t: np.minimum(t / WELL_RADIUS, 1.0) * eps[n_rings],
                            C1=np.inf, C2=np.inf, C3=2.0, label="annular")
    return Potential(domain, wells, family, growth=growth,
                     modulus=lambda s: np.zeros_like(s), name=f"annular[{n_rings}]")
