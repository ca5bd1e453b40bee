"""Sharp-interface energy of two-phase configurations and phase diagnostics.

A configuration takes the value ``-a(x)`` or ``+a(x)`` on each side of a
declared interface: a list of jump points in 1-D, a polyline in 2-D. Its
energy integrates the geodesic distance between the two traces along the
interface; where the interface runs along a partition boundary the two
sides see different potentials and the adapted distance is used.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .errors import DomainError, ParameterError
from .geodesics import (GeodesicQuery, GridGraph, adapted_distance, geodesic_distance,
                        scalar_sigma_oracle)
from .phasefield import Field
from .potentials import FrozenPotential, Potential


# --------------------------------------------------------------------------
# configurations


def _segments_cross(p1, p2, q1, q2) -> bool:
    def orient(a, b, c):
        return np.sign((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
    o1, o2 = orient(p1, p2, q1), orient(p1, p2, q2)
    o3, o4 = orient(q1, q2, p1), orient(q1, q2, p2)
    if o1 != o2 and o3 != o4 and 0 not in (o1, o2, o3, o4):
        return True
    return False


@dataclass(frozen=True)
class SharpConfig:
    """Declared interface with the sign of the well on each side.

    1-D: ``jumps`` are increasing interior points and ``first_sign`` is the
    sign of the well left of the first jump; signs flip at every jump.
    2-D: ``polyline`` is an open interface and ``left_sign`` the sign on the
    side its counterclockwise normal points to.
    """

    jumps: tuple = ()
    first_sign: int = -1
    polyline: np.ndarray | None = None
    left_sign: int = 1

    def __post_init__(self):
        jumps = tuple(float(j) for j in self.jumps)
        object.__setattr__(self, "jumps", jumps)
        if any(b <= a for a, b in zip(jumps[:-1], jumps[1:])):
            raise ParameterError("jump positions must be strictly increasing")
        if self.first_sign not in (-1, 1) or self.left_sign not in (-1, 1):
            raise ParameterError("well signs must be -1 or +1")
        if self.polyline is not None:
            P = np.asarray(self.polyline, dtype=float).reshape(-1, 2)
            if len(P) < 2:
                raise ParameterError("interface polyline needs two vertices")
            for i in range(len(P) - 1):
                for j in range(i + 2, len(P) - 1):
                    if _segments_cross(P[i], P[i + 1], P[j], P[j + 1]):
                        raise ParameterError("interface polyline intersects itself")
            object.__setattr__(self, "polyline", P)

    @property
    def signs(self) -> list:
        """Well sign on each interval between consecutive jumps (1-D)."""
        return [self.first_sign * (-1) ** k for k in range(len(self.jumps) + 1)]


@dataclass
class SharpEnergyReport:
    total: float
    contributions: list = field(default_factory=list)


def _well(pot: Potential, x, sign, subdomain):
    lo, hi = pot.wells.wells(x, subdomain=subdomain)
    return hi if sign > 0 else lo


def _distance(W: FrozenPotential, p, q, geodesic):
    if W.M == 1:
        return scalar_sigma_oracle(W, p[0], q[0])
    return geodesic_distance(GeodesicQuery(W, p, q, **geodesic)).distance


def _jump_energy(pot, x, side_minus, side_plus, s_minus, s_plus, geodesic, search):
    i = int(pot.domain.subdomain(side_minus))
    j = int(pot.domain.subdomain(side_plus))
    p = _well(pot, x, s_minus, i)
    q = _well(pot, x, s_plus, j)
    if i == j:
        return _distance(pot.at(x, i), p, q, geodesic), None
    res = adapted_distance(pot.at(x, i), pot.at(x, j), p, q, **{**search, **geodesic})
    return res.value, res.connector


def energy_infty(cfg: SharpConfig, pot: Potential, geodesic: dict | None = None,
                 search: dict | None = None) -> SharpEnergyReport:
    """Sharp-interface energy of a declared configuration.

    In 2-D each polyline segment contributes its length times the distance
    at its midpoint.
    """
    geodesic = geodesic or {}
    search = {"radius": 3.0, **(search or {})}
    d = pot.domain
    rows, total = [], 0.0
    if d.dim == 1:
        if cfg.polyline is not None:
            raise ParameterError("1-D domains take jump positions, not a polyline")
        span = d.upper[0] - d.lower[0]
        off = 1e-9 * span
        signs = cfg.signs
        for k, xj in enumerate(cfg.jumps):
            if not (d.lower[0] < xj < d.upper[0]):
                raise DomainError(f"jump at {xj} lies outside the domain interior")
            x = np.array([xj])
            val, conn = _jump_energy(pot, x, x - off, x + off, signs[k], signs[k + 1],
                                     geodesic, search)
            rows.append({"position": xj, "length": 1.0, "value": val, "connector": conn})
            total += val
        return SharpEnergyReport(total, rows)
    if cfg.polyline is None:
        return SharpEnergyReport(0.0, [])
    P = cfg.polyline
    d.check(P)
    span = max(np.subtract(d.upper, d.lower))
    off = 1e-9 * span
    for a, b in zip(P[:-1], P[1:]):
        mid = 0.5 * (a + b)
        seg = b - a
        length = float(np.linalg.norm(seg))
        if length == 0:
            continue
        normal = np.array([-seg[1], seg[0]]) / length
        val, conn = _jump_energy(pot, mid, mid - off * normal, mid + off * normal,
                                 -cfg.left_sign, cfg.left_sign, geodesic, search)
        rows.append({"position": mid.tolist(), "length": length, "value": val * length,
                     "density": val, "connector": conn})
        total += val * length
    return SharpEnergyReport(total, rows)


# --------------------------------------------------------------------------
# phase diagnostics


class DistanceTable:
    """``v -> d(-e1, v)`` for the reference potential ``f(delta * dist(v, {±e1}))``.

    The reference potential is capped at ``cap`` (by default its sup on the
    clamp cube ``[-L, L]^M``). In one phase dimension the table is a
    cumulative integral; otherwise a grid shortest-path field whose grid has
    nodes exactly at ``±e1``.
    """

    def __init__(self, pot: Potential, nodes_per_unit: int = 40, cap: float | None = None):
        self.M = pot.M
        delta = pot.wells.delta
        f = pot.growth
        self.clamp = max(2.0 * pot.wells.sup_norm / delta, 1.0)
        e1 = np.zeros(self.M)
        e1[0] = 1.0

        def ref(v):
            v = np.asarray(v, dtype=float)
            dist = np.minimum(np.linalg.norm(v - e1, axis=-1), np.linalg.norm(v + e1, axis=-1))
            return f(delta * dist)

        k = int(np.ceil(self.clamp * nodes_per_unit))
        extent = k / nodes_per_unit
        axis = np.linspace(-extent, extent, 2 * k + 1)
        self.cap = cap if cap is not None else float(np.max(ref(
            np.stack(np.meshgrid(*([axis] * self.M), indexing="ij"), -1).reshape(-1, self.M)
            if self.M <= 2 else axis[:, None] * np.ones(self.M))))
        self.reference = FrozenPotential(ref, self.M, wells=np.stack([-e1, e1]), cap=self.cap)
        if self.M == 1:
            z = np.array([scalar_sigma_oracle(self.reference, -1.0, v, n=64) for v in axis])
            self._interp = RegularGridInterpolator((axis,), z)
        else:
            graph = GridGraph(self.reference, np.zeros(self.M), extent, 2 * k + 1)
            dist, _ = graph.distances(-e1)
            self._interp = RegularGridInterpolator((axis,) * self.M, dist.reshape(graph.shape))
        self.top = float(self._interp(e1[None])[0])

    def __call__(self, w) -> np.ndarray:
        w = np.clip(np.asarray(w, dtype=float), -self.clamp, self.clamp)
        return np.minimum(self._interp(w.reshape(-1, self.M)).reshape(w.shape[:-1]), self.top)


def phase_indicator(u: Field, pot: Potential, table: DistanceTable | None = None) -> Field:
    """``z(x) = d(-e1, clamp(T(x)^{-1} u(x)))`` with values in ``[0, d(-e1, e1)]``."""
    table = table or DistanceTable(pot)
    w = pot.adjustment.inverse(u.grid.nodes, u.values)
    return Field(u.grid, table(w)[..., None])


def assign_phases(u: Field, pot: Potential, tol: float) -> tuple[np.ndarray, float]:
    """Label nodes -1/+1 when within ``tol`` of that well, 0 otherwise.

    Returns the labels and the measure fraction of unlabeled nodes.
    """
    if tol <= 0:
        raise ParameterError("tol must be positive")
    lo, hi = pot.wells.wells(u.grid.nodes)
    d_lo = np.linalg.norm(u.values - lo, axis=-1)
    d_hi = np.linalg.norm(u.values - hi, axis=-1)
    labels = np.zeros(u.grid.shape, dtype=int)
    labels[(d_lo <= tol) & (d_lo <= d_hi)] = -1
    labels[(d_hi <= tol) & (d_hi < d_lo)] = 1
    w = u.grid.weights
    return labels, float(np.sum(w[labels == 0]) / np.sum(w))
