"""Spatial domains and their partitions into subdomains."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ParameterError


def as_points(x, dim: int) -> np.ndarray:
    """Return ``x`` as a float array whose last axis has length ``dim``.

    For ``dim == 1`` scalars and flat arrays are read as collections of
    one-dimensional points.
    """
    x = np.asarray(x, dtype=float)
    if dim == 1 and (x.ndim == 0 or x.shape[-1] != 1):
        return x[..., None]
    if x.shape[-1] != dim:
        raise DomainError(f"expected points with last axis {dim}, got shape {x.shape}")
    return x


@dataclass(frozen=True)
class SpatialDomain:
    """Axis-aligned box in R^N, optionally split into K subdomains.

    In 1-D the partition is given by interior ``breakpoints``. In 2-D it is
    given by ``splitters``: polylines that are graphs over the first axis,
    ``x2 = phi_k(x1)``, ordered from bottom to top. A point belongs to the
    subdomain whose index counts the splitters lying strictly below it, so
    points on a boundary go to the lower index.
    """

    lower: tuple
    upper: tuple
    breakpoints: tuple = ()
    splitters: tuple = field(default=(), compare=False)

    def __post_init__(self):
        lower = tuple(float(v) for v in np.atleast_1d(self.lower))
        upper = tuple(float(v) for v in np.atleast_1d(self.upper))
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        if len(lower) != len(upper) or len(lower) not in (1, 2):
            raise ParameterError("domain must be 1-D or 2-D with matching bounds")
        if any(lo >= hi for lo, hi in zip(lower, upper)):
            raise ParameterError("domain lower bounds must be below upper bounds")
        bps = tuple(sorted(float(b) for b in self.breakpoints))
        object.__setattr__(self, "breakpoints", bps)
        if bps and self.dim != 1:
            raise ParameterError("breakpoints only apply to 1-D domains")
        if any(not (lower[0] < b < upper[0]) for b in bps):
            raise ParameterError("breakpoints must be interior")
        if len(set(bps)) != len(bps):
            raise ParameterError("breakpoints must be distinct")
        spl = tuple(np.asarray(s, dtype=float).reshape(-1, 2) for s in self.splitters)
        if spl and self.dim != 2:
            raise ParameterError("splitting polylines only apply to 2-D domains")
        for s in spl:
            if len(s) < 2 or np.any(np.diff(s[:, 0]) <= 0):
                raise ParameterError("splitters must be graphs over x1 with increasing vertices")
        object.__setattr__(self, "splitters", spl)
        if len(spl) > 1:
            xs = np.linspace(lower[0], upper[0], 257)
            heights = np.array([self._phi(k, xs) for k in range(len(spl))])
            if np.any(np.diff(heights, axis=0) < 0):
                raise ParameterError("splitters must not cross")

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def n_subdomains(self) -> int:
        return 1 + len(self.breakpoints) + len(self.splitters)

    @property
    def volume(self) -> float:
        return float(np.prod(np.subtract(self.upper, self.lower)))

    def _phi(self, k, x1):
        s = self.splitters[k]
        return np.interp(x1, s[:, 0], s[:, 1])

    def contains(self, x, atol: float = 1e-12) -> np.ndarray:
        x = as_points(x, self.dim)
        lo = np.asarray(self.lower) - atol
        hi = np.asarray(self.upper) + atol
        return np.all((x >= lo) & (x <= hi), axis=-1)

    def check(self, x) -> np.ndarray:
        """Return ``x`` as points, raising :class:`DomainError` if any is outside."""
        x = as_points(x, self.dim)
        inside = self.contains(x)
        if not np.all(inside):
            bad = x[~inside][0]
            raise DomainError(f"point {bad.tolist()} lies outside the domain box")
        return x

    def subdomain(self, x) -> np.ndarray:
        """Index of the subdomain containing each point (ties to the lower index)."""
        x = as_points(x, self.dim)
        if self.dim == 1:
            if not self.breakpoints:
                return np.zeros(x.shape[:-1], dtype=int)
            return np.searchsorted(np.asarray(self.breakpoints), x[..., 0], side="left")
        idx = np.zeros(x.shape[:-1], dtype=int)
        for k in range(len(self.splitters)):
            idx += (self._phi(k, x[..., 0]) < x[..., 1]).astype(int)
        return idx

    def grid(self, n) -> tuple[np.ndarray, tuple]:
        """Uniform node grid with ``n`` nodes per axis; returns (nodes, spacing)."""
        n = np.broadcast_to(np.atleast_1d(n), (self.dim,))
        axes = [np.linspace(lo, hi, int(k)) for lo, hi, k in zip(self.lower, self.upper, n)]
        h = tuple((hi - lo) / (int(k) - 1) for lo, hi, k in zip(self.lower, self.upper, n))
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
        return mesh, h
