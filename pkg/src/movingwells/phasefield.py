"""Discrete phase-field energy ``∫ W(x, u)/eps + eps |∇u|^2`` on node grids.

Node values live on a uniform grid that includes the box boundary. The
potential term uses trapezoid weights at the nodes; the gradient term uses
forward differences on grid edges, weighted by the trapezoid weights of the
transverse axes. With this choice the discrete gradient term is the
quadratic form of a sparse graph Laplacian, which also serves as the
preconditioner of the minimizer.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu

from .domain import SpatialDomain
from .errors import DomainError, ParameterError
from .geodesics import GeodesicQuery, geodesic_distance
from .potentials import Potential
from .profiles import ProfileConfig, reparameterize

UNIT_BALL_VOLUME = {1: 2.0, 2: np.pi}


# --------------------------------------------------------------------------
# grids and fields


class Grid:
    """Uniform node grid over a domain box with trapezoid weights."""

    def __init__(self, domain: SpatialDomain, shape):
        shape = tuple(int(k) for k in np.broadcast_to(np.atleast_1d(shape), (domain.dim,)))
        if any(k < 2 for k in shape):
            raise ParameterError("a grid needs at least two nodes per axis")
        self.domain = domain
        self.shape = shape
        self.nodes, self.spacing = domain.grid(shape)
        self.dim = domain.dim
        self.cell = float(np.prod(self.spacing))
        axis_w = []
        for k in shape:
            w = np.ones(k)
            w[[0, -1]] = 0.5
            axis_w.append(w)
        self.axis_weights = axis_w
        wt = axis_w[0]
        for w in axis_w[1:]:
            wt = np.multiply.outer(wt, w)
        self.weights = wt * self.cell          # quadrature weight of each node
        boundary = np.zeros(shape, dtype=bool)
        for ax in range(self.dim):
            sl = [slice(None)] * self.dim
            sl[ax] = [0, -1]
            boundary[tuple(sl)] = True
        self.boundary = boundary
        self._laplacian = None

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    def edge_weights(self, ax: int) -> np.ndarray:
        """Weight of each forward difference along ``ax`` (shape of ``diff``)."""
        w = np.ones(1)
        for k in range(self.dim):
            w = np.multiply.outer(w, np.ones(self.shape[k] - 1) if k == ax
                                  else self.axis_weights[k])
        return w.reshape([self.shape[k] - (k == ax) for k in range(self.dim)]) \
            * self.cell / self.spacing[ax] ** 2

    @property
    def laplacian(self) -> sparse.csr_matrix:
        """Matrix ``K`` with ``sum over edges of c_e |u_j - u_i|^2 = u^T K u``."""
        if self._laplacian is None:
            index = np.arange(self.size).reshape(self.shape)
            rows, cols, vals = [], [], []
            for ax in range(self.dim):
                a = np.take(index, np.arange(self.shape[ax] - 1), axis=ax).ravel()
                b = np.take(index, np.arange(1, self.shape[ax]), axis=ax).ravel()
                c = self.edge_weights(ax).ravel()
                rows += [a, b, a, b]
                cols += [a, b, b, a]
                vals += [c, c, -c, -c]
            self._laplacian = sparse.coo_matrix(
                (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                shape=(self.size, self.size)).tocsr()
        return self._laplacian


@dataclass
class Field:
    """Phase values ``u`` at the nodes of ``grid``; ``fixed`` marks trace nodes."""

    grid: Grid
    values: np.ndarray
    fixed: np.ndarray | None = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape[: self.grid.dim] != self.grid.shape:
            raise DomainError(f"field shape {v.shape} does not match grid {self.grid.shape}")
        if v.ndim == self.grid.dim:
            v = v[..., None]
        if not np.all(np.isfinite(v)):
            raise ParameterError("field values must be finite")
        self.values = v
        if self.fixed is not None:
            self.fixed = np.asarray(self.fixed, dtype=bool).reshape(self.grid.shape)

    @property
    def bc(self) -> str:
        return "free" if self.fixed is None or not self.fixed.any() else "fixed"

    @property
    def M(self) -> int:
        return self.values.shape[-1]

    @property
    def spacing(self):
        return self.grid.spacing

    def with_values(self, values) -> "Field":
        return Field(self.grid, np.asarray(values, dtype=float).reshape(self.values.shape),
                     self.fixed)

    def mass(self) -> np.ndarray:
        """``∫ u`` by the node quadrature (one entry per phase component)."""
        return np.tensordot(self.grid.weights, self.values, axes=self.grid.dim)

    def inner(self, a, b) -> float:
        """Weighted L2 product of two node arrays shaped like ``values``."""
        return float(np.sum(self.grid.weights[..., None] * a * b))


def wells_field(pot: Potential, grid: Grid, sign: float = 1.0, fixed: bool = False) -> Field:
    """Field equal to one of the wells at every node."""
    lo, hi = pot.wells.wells(grid.nodes)
    return Field(grid, hi if sign > 0 else lo, grid.boundary.copy() if fixed else None)


def _check_grid(u: Field, pot: Potential):
    if u.grid.domain.dim != pot.domain.dim or not np.all(pot.domain.contains(u.grid.nodes)):
        raise DomainError("field grid does not lie inside the potential's domain")


# --------------------------------------------------------------------------
# energy and gradient


def energy_parts(u: Field, pot: Potential, eps: float) -> tuple[float, float]:
    """Return the potential and gradient contributions separately."""
    _check_grid(u, pot)
    g = u.grid
    W = pot(g.nodes, u.values)
    bulk = float(np.sum(g.weights * W)) / eps
    grad = 0.0
    for ax in range(g.dim):
        du = np.diff(u.values, axis=ax)
        grad += float(np.sum(g.edge_weights(ax)[..., None] * du * du))
    return bulk, eps * grad


def energy_eps(u: Field, pot: Potential, eps: float) -> float:
    """Discrete ``∫ W(x, u)/eps + eps |∇u|^2``."""
    if eps <= 0:
        raise ParameterError("eps must be positive")
    bulk, grad = energy_parts(u, pot, eps)
    return bulk + grad


def euclidean_gradient(u: Field, pot: Potential, eps: float) -> np.ndarray:
    """Derivative of :func:`energy_eps` with respect to the node values."""
    g = u.grid
    flat = u.values.reshape(g.size, u.M)
    dW = pot.grad_u(g.nodes.reshape(g.size, g.dim), flat)
    out = g.weights.reshape(-1, 1) * dW / eps + 2.0 * eps * (g.laplacian @ flat)
    out = out.reshape(u.values.shape)
    if u.fixed is not None:
        out[u.fixed] = 0.0
    return out


def gradient_eps(u: Field, pot: Potential, eps: float) -> Field:
    """L2 gradient of the energy (zero at fixed trace nodes).

    Pairs with :meth:`Field.inner`: the directional derivative along ``v`` is
    ``u.inner(gradient_eps(u).values, v)``.
    """
    G = euclidean_gradient(u, pot, eps)
    return u.with_values(G / u.grid.weights[..., None])


# --------------------------------------------------------------------------
# minimization


@dataclass(frozen=True)
class PhaseFieldConfig:
    """Settings of the preconditioned descent.

    ``curvature`` scales the mass-matrix part of the preconditioner; a value
    near the second derivative of W at the wells gives Newton-like steps.
    """

    eps: float
    step_rule: str = "backtracking"
    step: float = 1.0
    armijo: float = 1e-4
    shrink: float = 0.5
    max_backtracks: int = 40
    max_iter: int = 2000
    rtol: float = 1e-11
    patience: int = 3
    curvature: float = 8.0

    def __post_init__(self):
        if self.eps <= 0 or self.rtol <= 0 or self.step <= 0:
            raise ParameterError("eps, rtol and step must be positive")
        if self.step_rule not in ("backtracking", "fixed"):
            raise ParameterError(f"unknown step rule {self.step_rule!r}")


@dataclass(frozen=True)
class MassConstraint:
    """Prescribed average ``m`` of ``u`` over the domain."""

    m: np.ndarray

    def total(self, grid: Grid) -> np.ndarray:
        return np.atleast_1d(np.asarray(self.m, dtype=float)) * grid.domain.volume

    def check_reachable(self, pot: Potential, grid: Grid):
        lo, hi = pot.wells.wells(grid.nodes)
        vol = grid.domain.volume
        mlo = np.tensordot(grid.weights, lo, axes=grid.dim) / vol
        mhi = np.tensordot(grid.weights, hi, axes=grid.dim) / vol
        m = np.atleast_1d(np.asarray(self.m, dtype=float))
        lower, upper = np.minimum(mlo, mhi), np.maximum(mlo, mhi)
        if np.any(m < lower - 1e-12) or np.any(m > upper + 1e-12):
            raise ParameterError(f"mass {m.tolist()} lies outside the well averages "
                                 f"[{lower.tolist()}, {upper.tolist()}]")


def project_mass(u: Field, constraint: MassConstraint) -> Field:
    """Shift the free nodes by a constant so the node quadrature of ``u`` hits the target."""
    g = u.grid
    free = np.ones(g.shape, dtype=bool) if u.fixed is None else ~u.fixed
    deficit = constraint.total(g) - u.mass()
    values = u.values.copy()
    values[free] += deficit / float(np.sum(g.weights[free]))
    return u.with_values(values)


@dataclass
class MinimizeReport:
    field: Field
    energies: list
    iterations: int
    residuals: list
    reason: str
    steps: list = field(default_factory=list)


def minimize(u0: Field, pot: Potential, cfg: PhaseFieldConfig,
             constraint: MassConstraint | None = None) -> MinimizeReport:
    """Minimize :func:`energy_eps` from ``u0`` by preconditioned descent.

    The search direction solves ``P d = -G`` with ``P`` the sum of the
    scaled node weights and the gradient-term Laplacian, restricted to the
    free nodes; with a mass constraint the direction is corrected to have
    zero mass and every iterate is re-projected. Steps satisfy an Armijo
    condition, so accepted energies never increase.
    """
    _check_grid(u0, pot)
    g, eps = u0.grid, cfg.eps
    free = np.ones(g.size, dtype=bool) if u0.fixed is None else ~u0.fixed.ravel()
    fidx = np.nonzero(free)[0]
    u = u0
    if constraint is not None:
        constraint.check_reachable(pot, g)
        u = project_mass(u, constraint)
    wv = g.weights.ravel()
    P = (cfg.curvature / eps) * sparse.diags(wv) + 2.0 * eps * g.laplacian
    lu = splu(P.tocsc()[fidx][:, fidx].tocsc())
    if constraint is not None:
        y = lu.solve(wv[fidx])
        by = float(wv[fidx] @ y)

    def residual(field_):
        if constraint is None:
            return 0.0
        return float(np.max(np.abs(field_.mass() - constraint.total(g))))

    E = energy_eps(u, pot, eps)
    energies, residuals, steps = [E], [residual(u)], []
    alpha, calm, reason, it = cfg.step, 0, "max_iter", 0
    for it in range(1, cfg.max_iter + 1):
        G = euclidean_gradient(u, pot, eps).reshape(g.size, -1)
        d = np.zeros_like(G)
        d[fidx] = -lu.solve(G[fidx])
        if constraint is not None:
            lam = (wv[fidx] @ d[fidx]) / by
            d[fidx] -= np.outer(y, lam)
        slope = float(np.sum(G * d))
        if not slope < 0:
            reason = "converged"
            it -= 1
            break
        accepted = False
        a = min(1.0, 2.0 * alpha) if cfg.step_rule == "backtracking" else cfg.step
        for _ in range(cfg.max_backtracks):
            trial = u.with_values(u.values + a * d.reshape(u.values.shape))
            if constraint is not None:
                trial = project_mass(trial, constraint)
            E_new = energy_eps(trial, pot, eps)
            if E_new <= E + cfg.armijo * a * slope and E_new <= E:
                accepted = True
                break
            if cfg.step_rule == "fixed":
                break
            a *= cfg.shrink
        if not accepted:
            reason = "stalled"
            it -= 1
            break
        decrease = E - E_new
        u, E, alpha = trial, E_new, a
        energies.append(E)
        residuals.append(residual(u))
        steps.append(a)
        calm = calm + 1 if decrease <= cfg.rtol * max(abs(E), 1e-300) else 0
        if calm >= cfg.patience:
            reason = "converged"
            break
    return MinimizeReport(u, energies, it, residuals, reason, steps)


# --------------------------------------------------------------------------
# recovery construction


@dataclass(frozen=True)
class RecoveryConfig:
    """Scales of the recovery construction.

    ``alpha`` and ``beta`` give the scales ``eps**alpha`` and ``eps**beta``
    (``0 < alpha < beta < 1``); ``path_bound`` is the length constant of the
    tube half-width ``path_bound * eps``. ``anchor`` places the profile
    centered on the interface ("center") or starting at it ("edge").
    """

    alpha: float = 0.25
    beta: float = 0.5
    path_bound: float = 4.0
    anchor: str = "center"
    eps_cert: float = 1e-4

    def __post_init__(self):
        if not (0 < self.alpha < self.beta < 1):
            raise ParameterError("need 0 < alpha < beta < 1")
        if self.path_bound <= 0:
            raise ParameterError("path_bound must be positive")
        if self.anchor not in ("center", "edge"):
            raise ParameterError("anchor must be 'center' or 'edge'")


@dataclass
class Recovery:
    field: Field
    profile: object
    tube: tuple
    distance: float


def build_recovery(pot: Potential, x0: float, eps: float, rec: RecoveryConfig, shape,
                   axis: int = 0, geodesic: dict | None = None) -> Recovery:
    """Recovery field for a flat interface ``{x[axis] = x0}``.

    Away from the interface ``u`` follows the wells, ``-a`` before it and
    ``+a`` after it. Inside the tube the geodesic between the wells at the
    frozen interface point is traversed with the profile at ``lam = eps^2``
    and carried to every node by the adjustment maps,
    ``u(x) = T(x) T(x0)^{-1} γ(g(t))``. The tube half-width is the larger of
    ``path_bound * eps`` and half the profile duration.
    """
    d = pot.domain
    grid = Grid(d, shape)
    if not (d.lower[axis] < x0 < d.upper[axis]):
        raise ParameterError("interface position must be interior")
    anchor_pt = np.array([0.5 * (lo + hi) for lo, hi in zip(d.lower, d.upper)])
    anchor_pt[axis] = x0
    W0 = pot.at(anchor_pt)
    lo_w, hi_w = W0.wells
    res = geodesic_distance(GeodesicQuery(W0, lo_w, hi_w, eps_cert=rec.eps_cert,
                                          **(geodesic or {})))
    prof = reparameterize(res.curve, W0, ProfileConfig(eps * eps, eps))
    half = max(rec.path_bound * eps, 0.5 * prof.tau)
    start = x0 - 0.5 * prof.tau if rec.anchor == "center" else x0
    tube = (x0 - half, x0 + half) if rec.anchor == "center" else (x0, x0 + 2 * half)
    if tube[0] <= d.lower[axis] or tube[1] >= d.upper[axis]:
        raise ParameterError(f"transition tube {tube} leaves the domain")
    xs = grid.nodes
    t = np.clip(xs[..., axis] - start, 0.0, prof.tau)
    gamma = prof.point(t)
    w = pot.adjustment.inverse(np.broadcast_to(anchor_pt, xs.shape), gamma)
    values = pot.adjustment(xs, w)
    # outside the tube the field is the well itself, not a rounding of it
    lo, hi = pot.wells.wells(xs)
    before, after = xs[..., axis] <= start, xs[..., axis] >= start + prof.tau
    values[before] = lo[before]
    values[after] = hi[after]
    return Recovery(Field(grid, values, grid.boundary.copy()), prof, tube, res.distance)


def build_recovery_1d(pot: Potential, x0: float, eps: float, rec: RecoveryConfig,
                      n: int = 8192, geodesic: dict | None = None) -> Field:
    if pot.domain.dim != 1:
        raise ParameterError("build_recovery_1d needs a 1-D domain")
    return build_recovery(pot, x0, eps, rec, n, geodesic=geodesic).field


# --------------------------------------------------------------------------
# mass correction


def bump_constant(N: int, r: float) -> float:
    """``-(N+1) / (|B_1| r^N)``: the hat with this height times a mass deficit
    removes that deficit exactly in the continuum."""
    if r <= 0:
        raise ParameterError("bump radius must be positive")
    return -(N + 1) / (UNIT_BALL_VOLUME[N] * r**N)


def mass_correction_bump(u: Field, target, center, radius: float, avoid=()) -> Field:
    """Add a hat ``c (mass(u) - target) (1 - |x - center|/radius)_+`` to ``u``.

    ``target`` is the prescribed ``∫ u``. The height is normalized by the
    discrete integral of the hat, so the node quadrature of the result hits
    the target to round-off (in the continuum this is
    :func:`bump_constant`). ``avoid`` lists intervals of the first axis,
    such as the transition tube, that the ball must not meet.
    """
    g = u.grid
    center = np.atleast_1d(np.asarray(center, dtype=float))
    if radius <= 0:
        raise ParameterError("bump radius must be positive")
    if np.any(center - radius < np.asarray(g.domain.lower)) or \
            np.any(center + radius > np.asarray(g.domain.upper)):
        raise ParameterError("bump ball leaves the domain")
    for lo, hi in avoid:
        if center[0] + radius > lo and center[0] - radius < hi:
            raise ParameterError("bump ball meets the transition tube")
    deficit = u.mass() - np.atleast_1d(np.asarray(target, dtype=float))
    if np.all(deficit == 0):
        return u
    hat = np.maximum(0.0, 1.0 - np.linalg.norm(g.nodes - center, axis=-1) / radius)
    hat_mass = float(np.sum(g.weights * hat))
    if hat_mass <= 0:
        raise ParameterError("bump ball contains no grid nodes")
    return u.with_values(u.values - hat[..., None] * deficit / hat_mass)


# --------------------------------------------------------------------------
# diagnostics


def interface_locations(u: Field, pot: Potential, axis: int = 0) -> np.ndarray:
    """Zero crossings of the first adjusted coordinate along ``axis``.

    In 1-D returns every crossing; in 2-D returns the first crossing of each
    grid line (NaN where a line has none).
    """
    g = u.grid
    w1 = pot.adjustment.inverse(g.nodes, u.values)[..., 0]
    w1 = np.moveaxis(w1, axis, -1)
    xs = np.moveaxis(g.nodes[..., axis], axis, -1)
    if g.dim == 1:
        k = np.nonzero(np.sign(w1[:-1]) * np.sign(w1[1:]) < 0)[0]
        return xs[k] + (xs[k + 1] - xs[k]) * w1[k] / (w1[k] - w1[k + 1])
    out = np.full(w1.shape[0], np.nan)
    for j in range(w1.shape[0]):
        k = np.nonzero(np.sign(w1[j, :-1]) * np.sign(w1[j, 1:]) < 0)[0]
        if k.size:
            k = k[0]
            out[j] = xs[j, k] + (xs[j, k + 1] - xs[j, k]) * w1[j, k] / (w1[j, k] - w1[j, k + 1])
    return out


def interface_location(u: Field, pot: Potential, axis: int = 0) -> float:
    """Single interface position: the crossing with the steepest jump in 1-D,
    the mean over grid lines in 2-D."""
    locs = interface_locations(u, pot, axis)
    if u.grid.dim == 2:
        return float(np.nanmean(locs)) if np.any(np.isfinite(locs)) else float("nan")
    if locs.size == 0:
        return float("nan")
    return float(locs[0]) if locs.size == 1 else float(np.median(locs))
