"""Well fields, double-well families, the adjustment map and potentials.

Wells are stored in the symmetric convention: at every spatial point the two
wells are ``c(x) - a(x)`` and ``c(x) + a(x)``, with ``c`` identically zero
unless an asymmetric pair was supplied.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .domain import SpatialDomain, as_points
from .errors import DomainError, ParameterError

Array = np.ndarray


def _as_phase(u, M: int) -> Array:
    u = np.asarray(u, dtype=float)
    if M == 1 and (u.ndim == 0 or u.shape[-1] != 1):
        return u[..., None]
    if u.shape[-1] != M:
        raise DomainError(f"expected phase points with last axis {M}, got shape {u.shape}")
    return u


def _vector_output(values, lead_shape, M):
    v = np.asarray(values, dtype=float)
    if M == 1 and (v.ndim == 0 or v.shape[-1:] != (1,)):
        v = v[..., None]
    return np.broadcast_to(v, lead_shape + (M,)).copy()


# --------------------------------------------------------------------------
# well fields


class WellField:
    """Well field ``x -> a(x)`` with one smooth branch per subdomain.

    Parameters
    ----------
    domain : SpatialDomain
    branches : sequence of callables
        ``branches[i](x)`` returns ``a_i(x)`` with shape ``x.shape[:-1] + (M,)``.
    M : int
        Dimension of the phase space (1, 2 or 3).
    delta : float, optional
        Separation constant, ``|a(x)| >= delta``. Estimated on a sample grid
        when omitted.
    center : callable, optional
        Midpoint field for asymmetric well pairs.
    """

    sample_nodes = 65

    def __init__(self, domain: SpatialDomain, branches: Sequence[Callable], M: int,
                 delta: float | None = None, center: Callable | None = None,
                 sup_norm: float | None = None, description: str = ""):
        if M not in (1, 2, 3):
            raise ParameterError("phase dimension M must be 1, 2 or 3")
        branches = list(branches)
        if len(branches) == 1 and domain.n_subdomains > 1:
            branches = branches * domain.n_subdomains
        if len(branches) != domain.n_subdomains:
            raise ParameterError(
                f"{len(branches)} well branches for {domain.n_subdomains} subdomains")
        self.domain = domain
        self.branches = tuple(branches)
        self.M = M
        self.center_fn = center
        self.description = description
        nodes, _ = domain.grid(self.sample_nodes)
        mags = np.linalg.norm(self(nodes), axis=-1)
        self.delta = float(mags.min()) if delta is None else float(delta)
        self.sup_norm = float(mags.max()) if sup_norm is None else float(sup_norm)
        if self.delta <= 0:
            raise ParameterError("well separation delta must be positive")

    def branch(self, i: int, x) -> Array:
        x = as_points(x, self.domain.dim)
        return _vector_output(self.branches[i](x), x.shape[:-1], self.M)

    def __call__(self, x) -> Array:
        x = as_points(x, self.domain.dim)
        lead = x.shape[:-1]
        if len(self.branches) == 1:
            return self.branch(0, x)
        idx = self.domain.subdomain(x)
        out = np.empty(lead + (self.M,))
        for i in range(len(self.branches)):
            mask = idx == i
            if np.any(mask):
                out[mask] = self.branch(i, x[mask])
        return out

    def center(self, x) -> Array:
        x = as_points(x, self.domain.dim)
        if self.center_fn is None:
            return np.zeros(x.shape[:-1] + (self.M,))
        return _vector_output(self.center_fn(x), x.shape[:-1], self.M)

    def wells(self, x, subdomain: int | None = None) -> tuple[Array, Array]:
        """Return the pair ``(c - a, c + a)`` at ``x``."""
        a = self(x) if subdomain is None else self.branch(subdomain, x)
        c = self.center(x)
        return c - a, c + a

    # -- constructors -----------------------------------------------------

    @classmethod
    def constant(cls, domain, value, **kw):
        value = np.atleast_1d(np.asarray(value, dtype=float))
        return cls(domain, [lambda x, v=value: v], M=value.size,
                   description=f"constant {value.tolist()}", **kw)

    @classmethod
    def affine(cls, domain, a0, A, **kw):
        """``a(x) = a0 + A x`` with ``A`` of shape (M, N)."""
        a0 = np.atleast_1d(np.asarray(a0, dtype=float))
        A = np.asarray(A, dtype=float).reshape(a0.size, domain.dim)
        return cls(domain, [lambda x: a0 + x @ A.T], M=a0.size,
                   description=f"affine a0={a0.tolist()} A={A.tolist()}", **kw)

    @classmethod
    def expression(cls, domain, exprs, center=None, **kw):
        """Build branches from expression strings.

        ``exprs`` is a list of components (one subdomain) or a list of such
        lists (one per subdomain). Expressions may use ``x`` (first axis),
        ``y`` (second axis) and the usual elementary functions.
        """
        if exprs and isinstance(exprs[0], str):
            exprs = [exprs]
        branches = [_compile_components(comps, domain.dim) for comps in exprs]
        M = len(exprs[0])
        if any(len(c) != M for c in exprs):
            raise ParameterError("all subdomain branches need the same number of components")
        center_fn = _compile_components(center, domain.dim) if center else None
        return cls(domain, branches, M=M, center=center_fn,
                   description=f"expression {exprs}", **kw)

    @classmethod
    def from_pair(cls, domain, a_fn, b_fn, M, **kw):
        """Symmetrize an asymmetric pair of wells by shifting with their midpoint."""
        return cls(domain, [lambda x: 0.5 * (np.asarray(a_fn(x)) - np.asarray(b_fn(x)))], M=M,
                   center=lambda x: 0.5 * (np.asarray(a_fn(x)) + np.asarray(b_fn(x))), **kw)


def _compile_components(components, dim):
    import sympy

    x, y = sympy.symbols("x y")
    syms = (x,) if dim == 1 else (x, y)
    funcs = [sympy.lambdify(syms, sympy.sympify(c), "numpy") for c in components]

    def branch(pts):
        args = [pts[..., k] for k in range(dim)]
        lead = pts.shape[:-1]
        return np.stack([np.broadcast_to(np.asarray(f(*args), dtype=float), lead)
                         for f in funcs], axis=-1)

    return branch


# --------------------------------------------------------------------------
# growth functions


@dataclass(frozen=True)
class GrowthFunction:
    """Growth profile ``f`` with the structural constants attached to it.

    ``C1`` bounds the two-sided comparison of ``W`` with ``f`` of the
    distance to the nearest well, ``C2`` is the linear-growth constant,
    ``C3`` the doubling constant.
    """

    f: Callable[[Array], Array]
    C1: float
    C2: float
    C3: float
    alpha: float | None = None
    R: float | None = None
    label: str = ""

    def __call__(self, t):
        return self.f(np.asarray(t, dtype=float))


def power_growth(q: float, C1=1.0, C2=2.0):
    return GrowthFunction(lambda t: np.abs(t) ** q, C1=C1, C2=C2, C3=2.0 ** q,
                          alpha=q, R=1.0, label=f"t^{q:g}")


# --------------------------------------------------------------------------
# double-well families


class QuarticFamily:
    """``W(u) = |u - a|^2 |u + a|^2``, i.e. ``(u^2 - a^2)^2`` when M = 1.

    The adjusted potential is ``|a|^4 |w - e1|^2 |w + e1|^2``.
    """

    name = "quartic"
    homogeneity = 4.0

    def value(self, u, a, c):
        v = u - c
        return np.sum((v - a) ** 2, axis=-1) * np.sum((v + a) ** 2, axis=-1)

    def grad(self, u, a, c):
        v = u - c
        dm = np.sum((v - a) ** 2, axis=-1)[..., None]
        dp = np.sum((v + a) ** 2, axis=-1)[..., None]
        return 2.0 * (v - a) * dp + 2.0 * (v + a) * dm

    def growth(self, delta, sup_norm):
        # d^2 max(delta, d)^2 <= W <= d^2 (2A + d)^2 with d the distance to the nearest well
        lo = (delta / (1.0 + delta)) ** 2
        hi = max(2.0 * sup_norm, 1.0) ** 2
        return GrowthFunction(lambda t: t ** 2 * (1.0 + t) ** 2, C1=max(1.0 / lo, hi),
                              C2=2.0 * sup_norm + 1.0, C3=16.0, alpha=2.0, R=1.0,
                              label="t^2 (1+t)^2")


class MinPowerFamily:
    """``W(u) = min(|u - a|^q, |u + a|^q)``."""

    name = "min_power"

    def __init__(self, q: float = 2.0):
        if q < 1:
            raise ParameterError("min-power exponent q must be >= 1")
        self.q = float(q)
        self.homogeneity = float(q)

    def value(self, u, a, c):
        v = u - c
        d = np.minimum(np.linalg.norm(v - a, axis=-1), np.linalg.norm(v + a, axis=-1))
        return d ** self.q

    def grad(self, u, a, c):
        v = u - c
        dm = np.linalg.norm(v - a, axis=-1)
        dp = np.linalg.norm(v + a, axis=-1)
        near = np.where((dm <= dp)[..., None], v - a, v + a)
        d = np.minimum(dm, dp)[..., None]
        with np.errstate(divide="ignore", invalid="ignore"):
            g = self.q * d ** (self.q - 2.0) * near
        # subgradient selection at the wells
        return np.where(d > 0, g, 0.0)

    def growth(self, delta, sup_norm):
        return power_growth(self.q, C1=1.0, C2=sup_norm + 1.0)


FAMILIES = {"quartic": QuarticFamily, "min_power": MinPowerFamily}


# --------------------------------------------------------------------------
# adjustment


class Adjustment:
    """Linear change of phase variable ``w -> c(x) + R(x) w`` sending ``±e1`` to the wells.

    ``R(x)`` has columns ``(a, a_perp, ...)`` and equals ``|a| Q`` with ``Q``
    orthonormal. In M = 2 ``a_perp`` is the counterclockwise rotation of
    ``a``; in M = 3 the remaining columns come from Gram-Schmidt against the
    first canonical axis that is not nearly parallel to ``a``.
    """

    def __init__(self, wells: WellField):
        self.wells = wells
        self.M = wells.M

    def matrix(self, x, subdomain: int | None = None) -> Array:
        a = self.wells(x) if subdomain is None else self.wells.branch(subdomain, x)
        return frame_matrix(a)

    def __call__(self, x, w, subdomain: int | None = None) -> Array:
        w = _as_phase(w, self.M)
        R = self.matrix(x, subdomain)
        return self.wells.center(x) + np.einsum("...ij,...j->...i", R, w)

    def inverse(self, x, u, subdomain: int | None = None) -> Array:
        u = _as_phase(u, self.M)
        R = self.matrix(x, subdomain)
        scale = np.sum(R[..., :, 0] ** 2, axis=-1)[..., None]
        v = u - self.wells.center(x)
        return np.einsum("...ji,...j->...i", R, v) / scale


def frame_matrix(a) -> Array:
    """Matrix with first column ``a`` and the remaining columns an orthogonal
    completion of the same length."""
    a = np.asarray(a, dtype=float)
    M = a.shape[-1]
    if M == 1:
        return a[..., None]
    if M == 2:
        perp = np.stack([-a[..., 1], a[..., 0]], axis=-1)
        return np.stack([a, perp], axis=-1)
    norm = np.linalg.norm(a, axis=-1, keepdims=True)
    ahat = a / norm
    # smallest-index canonical axis whose residual against ahat is not degenerate
    second = np.empty_like(a)
    chosen = np.zeros(a.shape[:-1], dtype=bool)
    for k in range(3):
        e = np.zeros(3)
        e[k] = 1.0
        r = e - ahat[..., k:k + 1] * ahat
        rn = np.linalg.norm(r, axis=-1)
        take = (~chosen) & (rn > 0.5)
        second[take] = r[take] / rn[take][..., None]
        chosen |= take
    third = np.cross(ahat, second)
    return np.stack([a, second * norm, third * norm], axis=-1)


# --------------------------------------------------------------------------
# potentials


class FrozenPotential:
    """Potential with the spatial variable frozen: a vectorized map ``u -> W(u)``.

    ``cap`` truncates the values, ``W ∧ cap``.
    """

    def __init__(self, fn: Callable, M: int, wells=None, grad: Callable | None = None,
                 cap: float | None = None, growth: GrowthFunction | None = None,
                 label: str = ""):
        self._fn = fn
        self._grad = grad
        self.M = M
        self.wells = None if wells is None else np.asarray(wells, dtype=float).reshape(2, M)
        self.cap = cap
        self.growth = growth
        self.label = label

    def __call__(self, u) -> Array:
        w = self._fn(_as_phase(u, self.M))
        if self.cap is not None:
            w = np.minimum(w, self.cap)
        return w

    def grad(self, u) -> Array:
        if self._grad is None:
            raise NotImplementedError("no analytic gradient for this potential")
        u = _as_phase(u, self.M)
        g = self._grad(u)
        if self.cap is not None:
            g = np.where((self._fn(u) < self.cap)[..., None], g, 0.0)
        return g

    def capped(self, level: float) -> "FrozenPotential":
        if level <= 0:
            raise ParameterError("truncation level must be positive")
        level = level if self.cap is None else min(level, self.cap)
        return FrozenPotential(self._fn, self.M, self.wells, self._grad, cap=level,
                               growth=self.growth, label=f"{self.label} ∧ {level:g}")

    def sup(self, center, radius, n: int = 41) -> float:
        """Sampled supremum of W over the ball of given radius."""
        axes = [np.linspace(-radius, radius, n)] * self.M
        pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, self.M)
        pts = pts[np.linalg.norm(pts, axis=-1) <= radius * (1 + 1e-12)]
        return float(np.max(self(pts + np.asarray(center, dtype=float))))


class Potential:
    """Space-dependent double-well potential ``W(x, u) = W_i(x, u)`` on subdomain i.

    Parameters
    ----------
    domain : SpatialDomain
    wells : WellField
    families : family or sequence of families
        One double-well family per subdomain (a single one is shared).
    growth : GrowthFunction, optional
        Defaults to the family's own growth profile.
    modulus : callable, optional
        Modulus of continuity used for the relative-continuity audit.
        Defaults to a Lipschitz modulus of ``|a|^q`` divided by ``delta^q``.
    """

    def __init__(self, domain: SpatialDomain, wells: WellField, families, growth=None,
                 modulus: Callable | None = None, name: str = ""):
        if not isinstance(families, (list, tuple)):
            families = [families]
        families = list(families)
        if len(families) == 1:
            families = families * domain.n_subdomains
        if len(families) != domain.n_subdomains:
            raise ParameterError("need one family per subdomain")
        self.domain = domain
        self.wells = wells
        self.families = tuple(families)
        self.M = wells.M
        self.name = name or families[0].name
        self.growth = growth or families[0].growth(wells.delta, wells.sup_norm)
        self.adjustment = Adjustment(wells)
        self._modulus = modulus

    # -- evaluation -------------------------------------------------------

    def _eval(self, x, u, which, subdomain=None):
        x = self.domain.check(x)
        u = _as_phase(u, self.M)
        lead = np.broadcast_shapes(x.shape[:-1], u.shape[:-1])
        if subdomain is None:
            idx = np.broadcast_to(self.domain.subdomain(x), lead)
            a = np.broadcast_to(self.wells(x), lead + (self.M,))
        else:
            idx = np.full(lead, int(subdomain))
            a = np.broadcast_to(self.wells.branch(subdomain, x), lead + (self.M,))
        c = np.broadcast_to(self.wells.center(x), lead + (self.M,))
        u = np.broadcast_to(u, lead + (self.M,))
        fams = set(map(id, self.families))
        if len(fams) == 1 and subdomain is None:
            return getattr(self.families[0], which)(u, a, c)
        shape = lead if which == "value" else lead + (self.M,)
        out = np.empty(shape)
        for i, fam in enumerate(self.families):
            mask = idx == i
            if np.any(mask):
                out[mask] = getattr(fam, which)(u[mask], a[mask], c[mask])
        return out

    def __call__(self, x, u) -> Array:
        return self._eval(x, u, "value")

    def grad_u(self, x, u) -> Array:
        return self._eval(x, u, "grad")

    def eval_subdomain(self, i, x, u) -> Array:
        """Evaluate branch ``W_i`` (with well branch ``a_i``) at ``x``."""
        return self._eval(x, u, "value", subdomain=i)

    def adjusted(self, x, w) -> Array:
        """Adjusted potential ``W(x, T(x, w))``; vanishes exactly at ``w = ±e1``."""
        return self(x, self.adjustment(x, w))

    def at(self, x, subdomain: int | None = None) -> FrozenPotential:
        """Freeze the spatial variable at the single point ``x``."""
        x = self.domain.check(np.asarray(x, dtype=float).reshape(self.domain.dim))
        i = int(self.domain.subdomain(x)) if subdomain is None else int(subdomain)
        lo, hi = self.wells.wells(x, subdomain=i)
        return FrozenPotential(
            lambda u: self._eval(x, u, "value", subdomain=i),
            self.M, wells=np.stack([lo, hi]),
            grad=lambda u: self._eval(x, u, "grad", subdomain=i),
            growth=self.growth, label=f"{self.name}@{np.round(x, 6).tolist()}[{i}]")

    # -- relative continuity ----------------------------------------------

    def modulus(self, s) -> Array:
        if self._modulus is None:
            self._modulus = self._derive_modulus()
        return self._modulus(np.asarray(s, dtype=float))

    def _derive_modulus(self):
        q = getattr(self.families[0], "homogeneity", None)
        if q is None or len(set(map(id, self.families))) > 1:
            return lambda s: np.full_like(s, np.inf)
        nodes, h = self.domain.grid(257 if self.domain.dim == 1 else 129)
        g = np.linalg.norm(self.wells(nodes), axis=-1) ** q
        idx = self.domain.subdomain(nodes)
        lip, jump = 0.0, 0.0
        for ax in range(self.domain.dim):
            dg = np.abs(np.diff(g, axis=ax))
            same = np.diff(idx, axis=ax) == 0
            if np.any(same):
                lip = max(lip, float(np.max(dg[same])) / h[ax])
            if np.any(~same):
                jump = max(jump, float(np.max(dg[~same])))
        lip *= 1.05
        scale = self.wells.delta ** q
        return lambda s: np.where(s > 0, (lip * s + jump) / scale, 0.0)


def build_potential(domain, wells, family="quartic", q: float = 2.0, **kw) -> Potential:
    fam = MinPowerFamily(q) if family == "min_power" else FAMILIES[family]()
    return Potential(domain, wells, fam, **kw)
