"""Degenerate geodesic distance ``inf ∫ 2 sqrt(W(γ)) |γ'|`` at a frozen spatial point.

The solver runs in two phases. A shortest path on a uniform grid over the
search box gives an initial polyline that already avoids the local minima
created by obstacle potentials. The polyline is then improved by red-black
per-vertex coordinate descent with golden-section line searches, at a
sequence of doubling resolutions. The difference between the last two
resolution levels is reported as the certification gap.

In one phase dimension the distance is computed directly by quadrature of
``2 sqrt(W)`` between the endpoints.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra

from .errors import DegenerateInputError, DomainError, ParameterError, UsageError
from .potentials import FrozenPotential

GAUSS3_NODES = 0.5 + 0.5 * np.array([-np.sqrt(0.6), 0.0, np.sqrt(0.6)])
GAUSS3_WEIGHTS = np.array([5.0, 8.0, 5.0]) / 18.0
GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


# --------------------------------------------------------------------------
# polylines


@dataclass(frozen=True)
class Polyline:
    """Curve through ``vertices`` with the uniform parameterization over [-1, 1]."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        if v.ndim == 1:
            v = v[:, None]
        if v.shape[0] < 2:
            raise DegenerateInputError("a polyline needs at least two vertices")
        if not np.all(np.isfinite(v)):
            raise DegenerateInputError("polyline vertices must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    @classmethod
    def segment(cls, p, q, n: int = 1) -> "Polyline":
        p = np.atleast_1d(np.asarray(p, dtype=float))
        q = np.atleast_1d(np.asarray(q, dtype=float))
        s = np.linspace(0.0, 1.0, n + 1)[:, None]
        return cls((1 - s) * p + s * q)

    @property
    def n_segments(self) -> int:
        return self.vertices.shape[0] - 1

    @property
    def M(self) -> int:
        return self.vertices.shape[1]

    @property
    def start(self):
        return self.vertices[0]

    @property
    def end(self):
        return self.vertices[-1]

    @property
    def segment_lengths(self) -> np.ndarray:
        return np.linalg.norm(np.diff(self.vertices, axis=0), axis=1)

    @property
    def length(self) -> float:
        return float(self.segment_lengths.sum())

    @property
    def params(self) -> np.ndarray:
        return np.linspace(-1.0, 1.0, self.vertices.shape[0])

    def point_at(self, t):
        t = np.clip(np.asarray(t, dtype=float), -1.0, 1.0)
        return np.stack([np.interp(t, self.params, self.vertices[:, k])
                         for k in range(self.M)], axis=-1)

    def sub_curve(self, t1: float, t2: float) -> "Polyline":
        """Restriction to the parameter interval ``[t1, t2]``."""
        if t2 < t1:
            raise ParameterError("sub-curve needs t1 <= t2")
        inner = self.params[(self.params > t1) & (self.params < t2)]
        ts = np.concatenate([[t1], inner, [t2]])
        return Polyline(self.point_at(ts))

    def resample(self, n: int) -> "Polyline":
        """Re-space to ``n`` segments of equal Euclidean length along the same trace."""
        lengths = self.segment_lengths
        total = lengths.sum()
        if total == 0.0:
            return Polyline(np.repeat(self.vertices[:1], n + 1, axis=0))
        cum = np.concatenate([[0.0], np.cumsum(lengths)])
        targets = np.linspace(0.0, total, n + 1)
        out = np.stack([np.interp(targets, cum, self.vertices[:, k]) for k in range(self.M)],
                       axis=-1)
        out[0], out[-1] = self.vertices[0], self.vertices[-1]
        return Polyline(out)

    def refined(self) -> "Polyline":
        """Insert the midpoint of every segment (same trace, twice the segments)."""
        v = self.vertices
        mids = 0.5 * (v[:-1] + v[1:])
        out = np.empty((2 * len(v) - 1, self.M))
        out[0::2] = v
        out[1::2] = mids
        return Polyline(out)

    def pruned(self, tol: float = 1e-14) -> "Polyline":
        """Drop zero-length segments."""
        v = self.vertices
        keep = np.concatenate([[True], np.linalg.norm(np.diff(v, axis=0), axis=1) > tol])
        keep[-1] = True
        v = v[keep]
        if len(v) >= 2 and np.linalg.norm(v[-1] - v[-2]) <= tol:
            v = np.delete(v, -2, axis=0)
        return Polyline(v)


# --------------------------------------------------------------------------
# energies


def _root(W, pts):
    return 2.0 * np.sqrt(np.maximum(W(pts), 0.0))


def segment_energies(W, v0, v1, rule: str = "gauss3") -> np.ndarray:
    """Quadrature of ``2 sqrt(W) |γ'|`` over straight segments ``v0 -> v1``."""
    d = v1 - v0
    lengths = np.linalg.norm(d, axis=-1)
    if rule == "midpoint":
        return _root(W, v0 + 0.5 * d) * lengths
    if rule != "gauss3":
        raise ParameterError(f"unknown quadrature rule {rule!r}")
    pts = v0[..., None, :] + GAUSS3_NODES[:, None] * d[..., None, :]
    return (_root(W, pts) @ GAUSS3_WEIGHTS) * lengths


def curve_energy(W, curve: Polyline, rule: str = "gauss3") -> float:
    """Energy ``∫ 2 sqrt(W(γ)) |γ'|`` of a polyline by composite quadrature."""
    v = curve.vertices
    return float(np.sum(segment_energies(W, v[:-1], v[1:], rule)))


def scalar_sigma_oracle(W, p: float, q: float, n: int = 512) -> float:
    """``|∫_p^q 2 sqrt(W(s)) ds|`` for a scalar phase variable.

    Composite three-point Gauss quadrature on ``n`` panels; wells inside
    ``(p, q)`` are panel breakpoints so the kink of ``sqrt(W)`` there is
    integrated exactly.
    """
    if getattr(W, "M", 1) != 1:
        raise UsageError("the scalar oracle needs a one-dimensional phase variable")
    p, q = float(np.squeeze(p)), float(np.squeeze(q))
    lo, hi = min(p, q), max(p, q)
    if hi == lo:
        return 0.0
    breaks = [lo, hi]
    if getattr(W, "wells", None) is not None:
        breaks += [float(w) for w in np.ravel(W.wells) if lo < w < hi]
    breaks = np.unique(breaks)
    total = 0.0
    for a, b in zip(breaks[:-1], breaks[1:]):
        k = max(1, int(round(n * (b - a) / (hi - lo))))
        edges = np.linspace(a, b, k + 1)
        pts = edges[:-1, None] + GAUSS3_NODES[None, :] * (b - a) / k
        total += float(np.sum(_root(W, pts[..., None]) @ GAUSS3_WEIGHTS) * (b - a) / k)
    return total


def polar_arc(p, q, segments: int = 256, plane=None) -> Polyline:
    """Curve ``r(s) e^{i ψ(s)}`` with ``r`` and ``ψ`` linear between the polar
    coordinates of ``p`` and ``q`` (angles taken in ``[0, 2π)``).

    For ``M > 2`` pass ``plane``, an orthonormal pair spanning a plane that
    contains ``0, p, q``.
    """
    p = np.atleast_1d(np.asarray(p, dtype=float))
    q = np.atleast_1d(np.asarray(q, dtype=float))
    if np.linalg.norm(p) == 0 or np.linalg.norm(q) == 0:
        raise DegenerateInputError("polar arc endpoints must be nonzero")
    if p.size == 2:
        basis = np.eye(2)
    elif plane is None:
        raise ParameterError("M > 2 needs the plane through 0, p and q")
    else:
        basis = np.asarray(plane, dtype=float).reshape(2, p.size).T
    pp, qq = basis.T @ p, basis.T @ q
    rp, rq = np.linalg.norm(pp), np.linalg.norm(qq)
    psi_p = np.arctan2(pp[1], pp[0]) % (2 * np.pi)
    psi_q = np.arctan2(qq[1], qq[0]) % (2 * np.pi)
    s = np.linspace(0.0, 1.0, segments + 1)
    r = s * rq + (1 - s) * rp
    psi = s * psi_q + (1 - s) * psi_p
    pts = np.stack([r * np.cos(psi), r * np.sin(psi)], axis=-1) @ basis.T
    pts[0], pts[-1] = p, q
    return Polyline(pts)


# --------------------------------------------------------------------------
# grid shortest paths


_OFFSETS = {
    (2, 8): [(1, 0), (0, 1), (1, 1), (1, -1)],
    (2, 16): [(1, 0), (0, 1), (1, 1), (1, -1), (1, 2), (2, 1), (1, -2), (2, -1)],
    (3, 6): [(1, 0, 0), (0, 1, 0), (0, 0, 1)],
    (3, 26): [(i, j, k) for i in (0, 1) for j in (-1, 0, 1) for k in (-1, 0, 1)
              if (i, j, k) > (0, 0, 0)],
}


class GridGraph:
    """Uniform grid over ``center + [-radius, radius]^M`` with edge weights
    ``2 sqrt(W(midpoint)) * edge length``."""

    def __init__(self, W, center, radius: float, n: int, neighborhood: int | None = None):
        M = W.M
        if M not in (2, 3):
            raise UsageError("grid shortest paths need M = 2 or 3")
        neighborhood = neighborhood or (8 if M == 2 else 6)
        if (M, neighborhood) not in _OFFSETS:
            raise ParameterError(f"unsupported neighborhood {neighborhood} for M = {M}")
        self.M, self.n, self.radius = M, int(n), float(radius)
        self.center = np.asarray(center, dtype=float).reshape(M)
        self.h = 2.0 * radius / (n - 1)
        axis = np.linspace(-radius, radius, n)
        self.shape = (n,) * M
        grids = np.meshgrid(*([axis] * M), indexing="ij")
        self.coords = np.stack(grids, axis=-1).reshape(-1, M) + self.center
        index = np.arange(n ** M).reshape(self.shape)
        rows, cols, weights = [], [], []
        for off in _OFFSETS[(M, neighborhood)]:
            src = tuple(slice(max(0, -o), n - max(0, o)) for o in off)
            dst = tuple(slice(max(0, o), n - max(0, -o)) for o in off)
            a, b = index[src].ravel(), index[dst].ravel()
            mid = 0.5 * (self.coords[a] + self.coords[b])
            length = self.h * float(np.linalg.norm(off))
            # explicit zeros would be dropped by the sparse graph
            w = _root(W, mid) * length + 1e-14 * length
            rows.append(a)
            cols.append(b)
            weights.append(w)
        N = n ** M
        self.graph = coo_matrix((np.concatenate(weights), (np.concatenate(rows),
                                                           np.concatenate(cols))),
                                shape=(N, N)).tocsr()

    def nearest(self, point) -> int:
        rel = (np.asarray(point, dtype=float) - self.center + self.radius) / self.h
        idx = np.clip(np.rint(rel).astype(int), 0, self.n - 1)
        return int(np.ravel_multi_index(tuple(idx), self.shape))

    def distances(self, source):
        return dijkstra(self.graph, directed=False, indices=self.nearest(source),
                        return_predecessors=True)

    def path(self, p, q) -> tuple[float, np.ndarray]:
        dist, pred = self.distances(p)
        t = self.nearest(q)
        nodes = [t]
        while pred[nodes[-1]] >= 0:
            nodes.append(pred[nodes[-1]])
        pts = self.coords[nodes[::-1]].copy()
        if len(pts) == 1:
            pts = np.vstack([pts, pts])
        pts[0], pts[-1] = p, q
        return float(dist[t]), pts


# --------------------------------------------------------------------------
# descent


def _pair_energy(W, prev, mid, nxt, rule):
    """Energy of the two segments ``prev -> mid -> nxt`` (one W evaluation)."""
    v0 = np.concatenate([prev, mid])
    v1 = np.concatenate([mid, nxt])
    e = segment_energies(W, v0, v1, rule)
    k = len(prev)
    return e[:k] + e[k:]


def _golden(local, lo, hi, iters):
    """Vectorized golden-section search; returns (step, improved mask)."""
    x1 = hi - GOLDEN * (hi - lo)
    x2 = lo + GOLDEN * (hi - lo)
    f0, f1, f2 = local(np.zeros_like(x1)), local(x1), local(x2)
    for _ in range(iters):
        left = f1 < f2
        hi = np.where(left, x2, hi)
        lo = np.where(left, lo, x1)
        x_new = np.where(left, hi - GOLDEN * (hi - lo), lo + GOLDEN * (hi - lo))
        f_new = local(x_new)
        x1, x2 = np.where(left, x_new, x2), np.where(left, x1, x_new)
        f1, f2 = np.where(left, f_new, f2), np.where(left, f1, f_new)
    t = np.where(f1 < f2, x1, x2)
    return t, np.minimum(f1, f2) < f0


def _newton_direction(W, prev, base, nxt, scale, rule):
    """Unit descent direction per vertex from a finite-difference model of the
    local energy: the Newton step where the Hessian is positive definite,
    the negative gradient elsewhere."""
    k, M = base.shape
    h = 1e-3 * scale
    eye = np.eye(M)
    offsets = [np.zeros(M)] + [s * eye[i] for i in range(M) for s in (1.0, -1.0)]
    pairs = [(i, j) for i in range(M) for j in range(i + 1, M)]
    offsets += [eye[i] + eye[j] for i, j in pairs]
    pts = np.concatenate([base + h[:, None] * o for o in offsets])
    f = _pair_energy(W, np.tile(prev, (len(offsets), 1)), pts,
                     np.tile(nxt, (len(offsets), 1)), rule).reshape(len(offsets), k)
    f0 = f[0]
    fp, fm = f[1:2 * M + 1:2], f[2:2 * M + 1:2]
    grad = ((fp - fm) / (2 * h)).T
    hess = np.empty((k, M, M))
    for i in range(M):
        hess[:, i, i] = (fp[i] - 2 * f0 + fm[i]) / h**2
    for m, (i, j) in enumerate(pairs):
        hij = (f[2 * M + 1 + m] - fp[i] - fp[j] + f0) / h**2
        hess[:, i, j] = hess[:, j, i] = hij
    direction = -grad
    try:
        eig = np.linalg.eigvalsh(hess)
        pd = np.all(eig > 1e-12 * np.maximum(np.abs(eig).max(axis=-1, keepdims=True), 1e-300),
                    axis=-1)
        if np.any(pd):
            direction[pd] = -np.linalg.solve(hess[pd], grad[pd][..., None])[..., 0]
    except np.linalg.LinAlgError:
        pass
    norm = np.linalg.norm(direction, axis=-1, keepdims=True)
    return np.where(norm > 0, direction / np.where(norm > 0, norm, 1.0), eye[0])


def descend(W, curve: Polyline, max_sweeps: int = 200, atol: float = 1e-7,
            rule: str = "gauss3", line_iters: int = 16, axis_every: int = 4):
    """Red-black per-vertex descent with golden-section line search.

    Each sweep updates interior vertices of one parity at a time, accepting
    a move only if it lowers the energy of the two adjacent segments. The
    search direction is a finite-difference Newton direction of the local
    energy; every ``axis_every``-th sweep searches along the coordinate axes
    instead, which is robust where the local energy is not smooth. The sweep ends with an equal-arc-length re-spacing
    that is kept only when it does not raise the energy. Stops after two
    consecutive sweeps that gain less than ``atol``. Returns the final
    polyline and the energy after every sweep (a non-increasing sequence).
    """
    V = np.array(curve.vertices)
    n = len(V) - 1
    M = V.shape[1]
    energy = float(np.sum(segment_energies(W, V[:-1], V[1:], rule)))
    trace = [energy]
    if n < 2:
        return Polyline(V), trace
    calm = 0
    for sweep in range(max_sweeps):
        V_start = V.copy()
        axis_sweep = sweep % axis_every == axis_every - 1
        for parity in (1, 2):
            ids = np.arange(parity, n, 2)
            if ids.size == 0:
                continue
            prev, nxt = V[ids - 1], V[ids + 1]
            left_len = np.linalg.norm(V[ids] - prev, axis=-1)
            right_len = np.linalg.norm(nxt - V[ids], axis=-1)
            short = np.minimum(left_len, right_len)
            # collapsed neighbours fall back to the longer side
            scale = 0.5 * np.where(short > 0, short, np.maximum(left_len, right_len))
            scale = np.where(scale > 0, scale, 1e-3)
            chord = nxt - prev
            clen = np.linalg.norm(chord, axis=-1, keepdims=True)
            tangent = np.where(clen > 0, chord / np.where(clen > 0, clen, 1.0), 0.0)
            if axis_sweep:
                dirs = [np.broadcast_to(np.eye(M)[ax], (len(ids), M)) for ax in range(M)]
            else:
                dirs = [_newton_direction(W, prev, V[ids], nxt, scale, rule)]
            for direction in dirs:
                # tangential sliding is left to the re-spacing step; letting
                # vertices slide would let them bunch up and open long
                # segments whose quadrature error the descent can exploit
                direction = direction - np.sum(direction * tangent, -1, keepdims=True) * tangent
                dn = np.linalg.norm(direction, axis=-1, keepdims=True)
                if not np.any(dn > 1e-8):
                    continue
                direction = np.where(dn > 1e-8, direction / np.where(dn > 0, dn, 1.0), 0.0)
                base = V[ids].copy()

                def local(t):
                    return _pair_energy(W, prev, base + t[:, None] * direction, nxt, rule)

                t, better = _golden(local, -scale, scale, line_iters)
                V[ids[better]] = base[better] + t[better, None] * direction[better]
        new = float(np.sum(segment_energies(W, V[:-1], V[1:], rule)))
        if new > energy:
            V, new = V_start, energy
        spaced = Polyline(V).resample(n).vertices
        e_spaced = float(np.sum(segment_energies(W, spaced[:-1], spaced[1:], rule)))
        if e_spaced <= new:
            V, new = np.array(spaced), e_spaced
        decrease = energy - new
        energy = new
        trace.append(energy)
        calm = calm + 1 if decrease <= atol else 0
        if calm >= 2:
            break
    return Polyline(V), trace


# --------------------------------------------------------------------------
# queries and results


@dataclass
class GeodesicQuery:
    """Endpoints and solver settings for one distance evaluation.

    ``potential`` is a :class:`FrozenPotential` (or any vectorized callable
    with an ``M`` attribute). The search box is ``box_center + [-box_radius,
    box_radius]^M``.
    """

    potential: object
    p: np.ndarray
    q: np.ndarray
    eps_cert: float = 1e-3
    box_radius: float | None = None
    box_center: np.ndarray | None = None
    grid_nodes: int = 81
    neighborhood: int | None = None
    max_levels: int = 8
    max_sweeps: int = 200
    max_vertices: int = 8192
    start_vertices: int = 4
    rule: str = "gauss3"

    def __post_init__(self):
        M = self.potential.M
        self.p = np.atleast_1d(np.asarray(self.p, dtype=float)).reshape(M)
        self.q = np.atleast_1d(np.asarray(self.q, dtype=float)).reshape(M)
        if self.eps_cert <= 0:
            raise ParameterError("eps_cert must be positive")
        if self.box_center is None:
            self.box_center = np.zeros(M)
        self.box_center = np.asarray(self.box_center, dtype=float).reshape(M)
        if self.box_radius is None:
            span = max(np.max(np.abs(self.p - self.box_center)),
                       np.max(np.abs(self.q - self.box_center)), 1e-12)
            self.box_radius = 1.5 * span + 0.5
        for name, pt in (("p", self.p), ("q", self.q)):
            if np.any(np.abs(pt - self.box_center) > self.box_radius * (1 + 1e-12)):
                raise DomainError(f"endpoint {name}={pt.tolist()} lies outside the search box")


@dataclass
class GeodesicResult:
    distance: float
    curve: Polyline
    length: float
    gap: float
    certified: bool
    iterations: int
    cap: float | None = None
    grid_value: float | None = None
    level_energies: list = field(default_factory=list)
    traces: list = field(default_factory=list)
    wall_time: float = 0.0
    query: GeodesicQuery | None = None


@dataclass(frozen=True)
class TruncationCap:
    level: float
    provenance: str = "user"

    def __post_init__(self):
        if not self.level > 0:
            raise ParameterError("truncation level must be positive")


def geodesic_distance(query: GeodesicQuery) -> GeodesicResult:
    """Distance between ``query.p`` and ``query.q`` with a near-minimizing polyline."""
    start = time.perf_counter()
    W, p, q = query.potential, query.p, query.q
    cap = getattr(W, "cap", None)
    if np.array_equal(p, q):
        curve = Polyline(np.stack([p, q]))
        return GeodesicResult(0.0, curve, 0.0, 0.0, True, 0, cap, 0.0,
                              wall_time=time.perf_counter() - start, query=query)
    if W.M == 1:
        n = 256
        d1 = scalar_sigma_oracle(W, p[0], q[0], n)
        d2 = scalar_sigma_oracle(W, p[0], q[0], 2 * n)
        curve = Polyline.segment(p, q, n)
        return GeodesicResult(d2, curve, curve.length, abs(d1 - d2),
                              abs(d1 - d2) <= query.eps_cert, 0, cap, d2,
                              level_energies=[d1, d2],
                              wall_time=time.perf_counter() - start, query=query)

    graph = GridGraph(W, query.box_center, query.box_radius, query.grid_nodes,
                      query.neighborhood)
    grid_value, pts = graph.path(p, q)
    path = Polyline(pts).pruned()
    # start coarse, unless the coarse chord cuts through obstacles the grid avoided
    n_full = int(np.clip(np.ceil(path.length / graph.h), 8, query.max_vertices))
    n0 = min(query.start_vertices, n_full)
    curve = path.resample(n0)
    while n0 < n_full and curve_energy(W, curve, query.rule) > 1.5 * grid_value + 1e-12:
        n0 = min(2 * n0, n_full)
        curve = path.resample(n0)
    levels, traces, sweeps = [], [], 0
    gap = np.inf
    for level in range(query.max_levels):
        if level > 0:
            if 2 * curve.n_segments > query.max_vertices:
                break
            curve = curve.refined()
        curve, trace = descend(W, curve, query.max_sweeps, atol=1e-3 * query.eps_cert,
                               rule=query.rule)
        traces.append(trace)
        sweeps += len(trace) - 1
        # the same trace on a 4x finer quadrature exposes error the descent exploited
        fine = curve_energy(W, curve.refined().refined(), query.rule)
        quad = abs(fine - trace[-1])
        levels.append(fine)
        if level >= 1:
            gap = max(abs(levels[-2] - levels[-1]), quad)
            if gap <= query.eps_cert:
                break
    return GeodesicResult(
        distance=levels[-1], curve=curve, length=curve.length, gap=float(gap),
        certified=bool(gap <= query.eps_cert), iterations=sweeps, cap=cap,
        grid_value=grid_value, level_energies=levels, traces=traces,
        wall_time=time.perf_counter() - start, query=query)


def truncated_distance(query: GeodesicQuery, cap: TruncationCap) -> GeodesicResult:
    """Distance for the truncated potential ``W ∧ cap.level``."""
    capped = query.potential.capped(cap.level)
    q2 = GeodesicQuery(**{**query.__dict__, "potential": capped})
    return geodesic_distance(q2)


# --------------------------------------------------------------------------
# bounds from the growth conditions


def lower_growth(W: FrozenPotential):
    """Profile ``f_G`` and constant ``C_G`` with ``2 sqrt(W(u)) >= f_G(|u|) / C_G``.

    Uses the lower comparison ``W >= f(d)/C1`` and ``d >= |u| - max|well|``.
    """
    g = W.growth
    A = float(np.max(np.linalg.norm(W.wells, axis=-1))) if W.wells is not None else 0.0
    return (lambda t: 2.0 * np.sqrt(g(np.maximum(np.asarray(t) - A, 0.0)))), np.sqrt(g.C1)


def minimizer_bound(W: FrozenPotential, r: float, t_max: float = 1e4, n: int = 200001) -> float:
    """Radius ``K`` containing every 1-minimizer between points of ``B_r(0)``.

    The cumulative integral of the lower growth profile from ``r`` must beat
    twice ``C_G`` times (max distance in the ball + 1); the maximal distance
    is bounded by the sup of ``2 sqrt(W)`` over the ball times its diameter.
    The smallest admissible ``K`` on the sampling grid is returned (minimal
    left inverse of the cumulative integral).
    """
    fG, CG = lower_growth(W)
    dmax = 2.0 * np.sqrt(W.sup(np.zeros(W.M), r)) * 2.0 * r
    target = 2.0 * CG * (dmax + 1.0)
    ts = np.linspace(r, t_max, n)
    vals = fG(ts)
    cum = np.concatenate([[0.0], np.cumsum(vals[:-1] * np.diff(ts))])
    hit = np.nonzero(cum > target)[0]
    if hit.size == 0:
        raise ParameterError("growth too weak to bound minimizers on the sampled range")
    return float(ts[hit[0]])


def default_cap(W: FrozenPotential, r: float) -> TruncationCap:
    """Four times the sup of W on the ball that contains all near-minimizers."""
    K = minimizer_bound(W, r)
    return TruncationCap(4.0 * W.sup(np.zeros(W.M), K), provenance=f"derived(K={K:.4g})")


def path_length_constant(W: FrozenPotential, p, q) -> float:
    """Endpoint scale ``1 + f(|p|)|p| + f(|q|)|q|`` of the path-length bound.

    Dividing a minimizer's Euclidean length by this scale gives the fitted
    length constant for that pair of endpoints.
    """
    f = W.growth
    p, q = np.atleast_1d(p), np.atleast_1d(q)
    rp, rq = np.linalg.norm(p), np.linalg.norm(q)
    return 1.0 + float(f(np.array(rp))) * rp + float(f(np.array(rq))) * rq


# --------------------------------------------------------------------------
# locality and adapted distance


@dataclass
class LocalityReport:
    checks: int
    violations: int
    max_violation: float
    intervals: list


def verify_locality(result: GeodesicResult, W=None, n_subintervals: int = 100,
                    rng=None, tol: float | None = None, **query_kw) -> LocalityReport:
    """Check sub-arc energies against fresh distance solves between their endpoints.

    A violation is a sub-arc whose energy exceeds the solved distance by
    more than the result's gap plus ``tol``.
    """
    W = W if W is not None else result.query.potential
    rng = rng if rng is not None else np.random.default_rng(0)
    base = {} if result.query is None else {
        k: getattr(result.query, k) for k in ("eps_cert", "box_radius", "box_center",
                                              "grid_nodes", "neighborhood", "rule")}
    base.update(query_kw)
    tol = base.get("eps_cert", 1e-3) if tol is None else tol
    worst, bad, rows = -np.inf, 0, []
    draws = [(-1.0, 1.0)] + [tuple(np.sort(rng.uniform(-1, 1, 2)))
                             for _ in range(n_subintervals - 1)]
    for t1, t2 in draws:
        sub = result.curve.sub_curve(t1, t2)
        e_sub = curve_energy(W, sub, base.get("rule", "gauss3"))
        d = geodesic_distance(GeodesicQuery(W, sub.start, sub.end, **base)).distance
        excess = e_sub - (d + result.gap + tol)
        worst = max(worst, excess)
        bad += int(excess > 0)
        rows.append((t1, t2, e_sub, d, excess))
    return LocalityReport(len(draws), bad, float(worst), rows)


@dataclass
class AdaptedResult:
    value: float
    connector: np.ndarray
    audited: list


def adapted_distance(Wi, Wj, p, q, center=None, radius: float = 3.0, n: int = 401,
                     refine: bool = True, **query_kw) -> AdaptedResult:
    """``inf_r d_{Wi}(p, r) + d_{Wj}(r, q)`` over a search grid around ``center``."""
    M = Wi.M
    if n < 1 or radius <= 0:
        raise ParameterError("empty search grid for the connecting point")
    p = np.atleast_1d(np.asarray(p, dtype=float))
    q = np.atleast_1d(np.asarray(q, dtype=float))
    center = np.zeros(M) if center is None else np.atleast_1d(np.asarray(center, dtype=float))
    if M == 1:
        rs = center[0] + np.linspace(-radius, radius, n)
        rs = np.unique(np.concatenate([rs, p, q]))
        vals = np.array([scalar_sigma_oracle(Wi, p[0], r) + scalar_sigma_oracle(Wj, r, q[0])
                         for r in rs])
        audited = list(zip(rs.tolist(), vals.tolist()))
        k = int(np.argmin(vals))
        if refine and 0 < k < len(rs) - 1:
            f = lambda r: scalar_sigma_oracle(Wi, p[0], r) + scalar_sigma_oracle(Wj, r, q[0])
            lo, hi = rs[k - 1], rs[k + 1]
            for _ in range(60):
                x1, x2 = hi - GOLDEN * (hi - lo), lo + GOLDEN * (hi - lo)
                if f(x1) < f(x2):
                    hi = x2
                else:
                    lo = x1
            r = 0.5 * (lo + hi)
            audited.append((r, f(r)))
        best = min(audited, key=lambda a: a[1])
        return AdaptedResult(float(best[1]), np.array([best[0]]), audited)

    gi = GridGraph(Wi, center, radius, query_kw.pop("grid_nodes", 81))
    gj = GridGraph(Wj, center, radius, gi.n)
    di, _ = gi.distances(p)
    dj, _ = gj.distances(q)
    total = di + dj
    order = np.argsort(total)
    candidates = [gi.coords[order[0]]]
    if refine:
        base = np.unravel_index(order[0], gi.shape)
        for off in np.ndindex(*(3,) * M):
            idx = np.clip(np.array(base) + np.array(off) - 1, 0, gi.n - 1)
            pt = gi.coords[np.ravel_multi_index(tuple(idx), gi.shape)]
            if not any(np.array_equal(pt, c) for c in candidates):
                candidates.append(pt)
    for extra in (p, q):
        if np.all(np.abs(extra - center) <= radius):
            candidates.append(extra)
    audited = []
    kw = {"box_center": center, "box_radius": radius, **query_kw}
    for r in candidates:
        val = (geodesic_distance(GeodesicQuery(Wi, p, r, **kw)).distance
               + geodesic_distance(GeodesicQuery(Wj, r, q, **kw)).distance)
        audited.append((np.asarray(r), val))
    best = min(audited, key=lambda a: a[1])
    return AdaptedResult(float(best[1]), best[0], audited)
