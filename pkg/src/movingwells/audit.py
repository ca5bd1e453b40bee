"""Sampled audits of the structural and regularity hypotheses on a potential.

Each check evaluates the relevant inequality on a sample grid and records
the worst ratio together with the point where it occurs. Failures are
report entries, never exceptions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .potentials import Potential


@dataclass
class AuditEntry:
    hypothesis: str
    passed: bool
    worst: float
    witness: dict = field(default_factory=dict)
    note: str = ""


@dataclass
class AuditReport:
    potential: str
    entries: list

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    def __getitem__(self, key) -> AuditEntry:
        for e in self.entries:
            if e.hypothesis == key:
                return e
        raise KeyError(key)

    def rows(self):
        for e in self.entries:
            yield {"hypothesis": e.hypothesis, "passed": e.passed, "worst": e.worst,
                   "witness": e.witness, "note": e.note}


@dataclass
class SamplingSpec:
    """Sample densities for :func:`audit_hypotheses` (33 nodes per axis by default)."""

    x_nodes: int = 33
    u_nodes: int = 33
    u_radius: float | None = None
    t_max: float = 10.0
    t_samples: int = 200
    pairs: int = 2000
    rtol: float = 1e-9
    well_tol: float = 1e-12
    seed: int = 0


def _u_grid(M, radius, n):
    axes = [np.linspace(-radius, radius, n)] * M
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, M)


def audit_hypotheses(pot: Potential, spec: SamplingSpec | None = None) -> AuditReport:
    spec = spec or SamplingSpec()
    rng = np.random.default_rng(spec.seed)
    g = pot.growth
    xs, _ = pot.domain.grid(spec.x_nodes)
    xs = xs.reshape(-1, pot.domain.dim)
    a = pot.wells(xs)
    c = pot.wells.center(xs)
    radius = spec.u_radius or max(2.0 * g.C2 if np.isfinite(g.C2) else 0.0,
                                  2.0 * pot.wells.sup_norm + 1.0)
    us = _u_grid(pot.M, radius, spec.u_nodes)
    entries = []

    # wells are zeros, and W is positive away from them
    at_wells = np.maximum(np.abs(pot(xs, c + a)), np.abs(pot(xs, c - a)))
    W = pot(xs[:, None, :], us[None, :, :])
    dmin = np.minimum(np.linalg.norm(us[None] - (c + a)[:, None], axis=-1),
                      np.linalg.norm(us[None] - (c - a)[:, None], axis=-1))
    away = dmin > 1e-6
    min_away = float(np.min(W[away])) if np.any(away) else np.inf
    k = int(np.argmax(at_wells))
    entries.append(AuditEntry(
        "wells_are_zeros", bool(at_wells.max() <= spec.well_tol and min_away > 0),
        float(at_wells.max()), {"x": xs[k].tolist()},
        f"min W away from wells = {min_away:.3e}"))

    # separation |a(x)| >= delta
    mags = np.linalg.norm(a, axis=-1)
    k = int(np.argmin(mags))
    entries.append(AuditEntry(
        "well_separation", bool(mags[k] >= pot.wells.delta * (1 - spec.rtol)), float(mags[k]),
        {"x": xs[k].tolist()}, f"delta = {pot.wells.delta:g}"))

    # two-sided comparison with f(distance to wells)
    fd = g(dmin)
    ok = fd > 1e-14
    ratio_hi = np.where(ok, W / np.where(ok, fd, 1.0), 0.0)
    ratio_lo = np.where(ok, np.where(ok, fd, 1.0) / np.maximum(W, 1e-300), 0.0)
    worst = max(float(ratio_hi.max()), float(ratio_lo.max()))
    i, j = np.unravel_index(np.argmax(np.maximum(ratio_hi, ratio_lo)), W.shape)
    entries.append(AuditEntry(
        "growth_comparison", bool(worst <= g.C1 * (1 + spec.rtol)), worst,
        {"x": xs[i].tolist(), "u": us[j].tolist()}, f"C1 = {g.C1:g}"))

    # linear growth at infinity
    norms = np.linalg.norm(us, axis=-1)
    far = norms >= g.C2
    if np.any(far) and np.isfinite(g.C2):
        need = np.where(far[None], norms[None] / g.C2 - W, -np.inf)
        i, j = np.unravel_index(np.argmax(need), need.shape)
        entries.append(AuditEntry(
            "linear_growth", bool(need[i, j] <= spec.rtol * max(1.0, norms[j])), float(need[i, j]),
            {"x": xs[i].tolist(), "u": us[j].tolist()}, f"C2 = {g.C2:g}"))
    else:
        entries.append(AuditEntry("linear_growth", False, np.inf, {}, "no samples beyond C2"))

    # relative continuity of the adjusted potential
    n = len(xs)
    pi = rng.integers(0, n, spec.pairs)
    pj = rng.integers(0, n, spec.pairs)
    ws = _u_grid(pot.M, radius / max(pot.wells.delta, 1e-12), spec.u_nodes)
    Wx = pot.adjusted(xs[pi][:, None, :], ws[None])
    Wy = pot.adjusted(xs[pj][:, None, :], ws[None])
    dist = np.linalg.norm(xs[pi] - xs[pj], axis=-1)
    omega = pot.modulus(dist)[:, None]
    excess = np.abs(Wx - Wy) - omega * Wx
    scale = np.maximum(1.0, np.abs(Wx))
    i, j = np.unravel_index(np.argmax(excess / scale), excess.shape)
    omega0 = float(pot.modulus(np.array([1e-12]))[0])
    entries.append(AuditEntry(
        "relative_continuity", bool(excess[i, j] <= spec.rtol * scale[i, j] and omega0 <= 1e-9),
        float(excess[i, j]), {"x": xs[pi[i]].tolist(), "y": xs[pj[i]].tolist(),
                               "w": ws[j].tolist()},
        f"omega(0+) = {omega0:.3e}"))

    # doubling of the growth profile
    ts = np.geomspace(1e-4, spec.t_max, spec.t_samples)
    ft = g(ts)
    ratio = g(2 * ts) / np.maximum(ft, 1e-300)
    k = int(np.argmax(ratio))
    mono = bool(np.all(np.diff(g(np.linspace(0.0, g.R or spec.t_max, 200))) >= 0)
                and float(g(np.array([0.0]))[0]) == 0.0)
    entries.append(AuditEntry(
        "doubling_growth", bool(ratio[k] <= g.C3 * (1 + spec.rtol) and mono), float(ratio[k]),
        {"t": float(ts[k])}, f"C3 = {g.C3:g}; f(0)=0 and nondecreasing: {mono}"))
    return AuditReport(pot.name, entries)
