"""Transition profiles: a geodesic traversed at the speed that balances the two
energy terms at interface scale ``eps``.

Along a curve ``γ`` parameterized over ``[-1, 1]`` the new time is

    t(s) = ∫_{-1}^{s} eps |γ'| / sqrt(lam + W(γ)) dσ,

so that ``g = t^{-1}`` satisfies ``g'^2 = (lam + W(γ(g))) / (eps^2 |γ'(g)|^2)``.
The table of ``(t, s)`` values is kept as is; inverting it is a swap of axes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, ParameterError
from .geodesics import Polyline, curve_energy

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


@dataclass(frozen=True)
class ProfileConfig:
    lam: float
    eps: float
    panel_scale: float = 0.25
    max_panels: int = 200_000

    def __post_init__(self):
        if not (self.lam > 0 and self.eps > 0):
            raise ParameterError("lam and eps must be positive")
        if self.panel_scale <= 0:
            raise ParameterError("panel_scale must be positive")


@dataclass(frozen=True)
class Profile:
    tau: float
    t: np.ndarray          # increasing times, t[0] = 0, t[-1] = tau
    s: np.ndarray          # matching curve parameters, s[0] = -1, s[-1] = 1
    curve: Polyline
    eps: float
    lam: float
    sup_w: float           # largest W met by the quadrature along the curve
    length: float

    def g(self, t):
        return np.interp(t, self.t, self.s)

    def speed(self, W, t):
        """``g'(t)`` from the defining relation."""
        s = self.g(t)
        return np.sqrt(self.lam + W(self.curve.point_at(s))) / (self.eps * _curve_speed(self.curve, s))

    def point(self, t):
        return self.curve.point_at(self.g(t))

    @property
    def lower_constant(self) -> float:
        """``C`` in ``C * eps <= tau``."""
        return self.length / np.sqrt(self.lam + self.sup_w)


def _curve_speed(curve: Polyline, s):
    """``|γ'(s)|`` of the uniform parameterization (one-sided at vertices)."""
    n = curve.n_segments
    k = np.clip(np.floor((np.asarray(s) + 1.0) * n / 2.0).astype(int), 0, n - 1)
    return curve.segment_lengths[k] * n / 2.0


def _panels(curve: Polyline, cfg: ProfileConfig):
    """Panel breakpoints in ``s``; every vertex is a breakpoint."""
    n = curve.n_segments
    lengths = curve.segment_lengths
    width = cfg.panel_scale * min(1.0, np.sqrt(cfg.lam), cfg.eps)
    counts = np.maximum(1, np.ceil(lengths / width).astype(int))
    if counts.sum() > cfg.max_panels:
        counts = np.maximum(1, np.floor(counts * cfg.max_panels / counts.sum()).astype(int))
    knots = np.linspace(-1.0, 1.0, n + 1)
    pieces = [np.linspace(knots[k], knots[k + 1], counts[k] + 1)[:-1] for k in range(n)]
    return np.concatenate(pieces + [[1.0]]), np.repeat(np.arange(n), counts)


def reparameterize(curve: Polyline, W, cfg: ProfileConfig) -> Profile:
    """Build the profile of ``curve`` for the frozen potential ``W``.

    Zero-length segments are dropped first. Each segment is split into
    panels no longer than ``panel_scale * min(1, sqrt(lam), eps)`` and the
    time integral is accumulated panel by panel with 8-point Gauss rules.
    """
    curve = curve.pruned()
    if curve.length == 0.0:
        raise DegenerateInputError("cannot reparameterize a zero-length curve")
    edges, seg = _panels(curve, cfg)
    lo, hi = edges[:-1], edges[1:]
    half = 0.5 * (hi - lo)
    nodes = (0.5 * (hi + lo))[:, None] + half[:, None] * _GL_NODES[None, :]
    speed = (curve.segment_lengths * curve.n_segments / 2.0)[seg]
    w_vals = np.maximum(W(curve.point_at(nodes)), 0.0)
    dens = cfg.eps * speed[:, None] / np.sqrt(cfg.lam + w_vals)
    dt = (dens @ _GL_WEIGHTS) * half
    t = np.concatenate([[0.0], np.cumsum(dt)])
    keep = np.concatenate([[True], np.diff(t) > 0])
    return Profile(tau=float(t[-1]), t=t[keep], s=edges[keep], curve=curve, eps=cfg.eps,
                   lam=cfg.lam, sup_w=float(w_vals.max()), length=curve.length)


def profile_energy(profile: Profile, W, rule: str = "gauss3") -> tuple[float, float]:
    """Return ``(lhs, rhs)``: the profile's energy on ``[0, tau]`` and its bound.

    The left side is evaluated in the time variable, with ``g'`` taken from
    the tabulated inverse (difference quotients of the table) and ``W`` at
    interval midpoints. The right side is the curve energy plus
    ``2 sqrt(lam)`` times the Euclidean length.
    """
    t, s = profile.t, profile.s
    dt = np.diff(t)
    ds = np.diff(s)
    mid = 0.5 * (s[:-1] + s[1:])
    w_mid = np.maximum(W(profile.curve.point_at(mid)), 0.0)
    speed = _curve_speed(profile.curve, mid)
    slope = ds / dt
    lhs = float(np.sum((w_mid / profile.eps + profile.eps * speed**2 * slope**2) * dt))
    rhs = curve_energy(W, profile.curve, rule) + 2.0 * np.sqrt(profile.lam) * profile.length
    return lhs, rhs
