"""Batch experiments behind the command line: Γ-sweeps, geodesic benchmarks,
the annular path-length study and hypothesis audits.

Each runner returns an :class:`ExperimentResult` holding a table with a fixed
column order, optional timing rows (kept apart so the main table is
reproducible byte for byte) and in-memory artifacts for plotting.
"""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import brentq

from . import __version__
from .annular import make_annular_potential
from .audit import SamplingSpec, audit_hypotheses
from .config import ExperimentSpec, as_array, build_potential_from
from .errors import MovingWellsError, ParameterError
from .fieldio import write_field
from .geodesics import GeodesicQuery, TruncationCap, geodesic_distance, truncated_distance
from .phasefield import (Field, MassConstraint, PhaseFieldConfig, RecoveryConfig,
                         build_recovery, energy_eps, interface_location, minimize,
                         project_mass)
from .sharp import SharpConfig, energy_infty

GAMMA_COLUMNS = ["eps", "n", "interface_target", "target_energy", "recovery_energy",
                 "energy", "gap", "rel_gap", "interface", "iterations", "reason",
                 "max_mass_residual"]
GEODESIC_COLUMNS = ["query", "x", "p", "q", "cap", "distance", "length", "gap", "certified",
                    "iterations", "grid_value"]
ANNULAR_COLUMNS = ["rings", "cap", "distance", "length", "gap", "certified", "grid_value"]
AUDIT_COLUMNS = ["family", "hypothesis", "passed", "worst", "witness", "note"]


class ExperimentError(MovingWellsError):
    """An error raised inside an experiment, with the experiment context attached."""


@dataclass
class ExperimentResult:
    kind: str
    columns: list
    rows: list
    config_hash: str
    seed: int
    timings: list = field(default_factory=list)
    artifacts: dict = field(default_factory=dict)

    def column(self, name):
        return [r[name] for r in self.rows]

    def to_csv(self) -> str:
        """CSV text with provenance columns appended to every row."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        cols = self.columns + ["config_hash", "version", "seed"]
        writer.writerow(cols)
        for row in self.rows:
            writer.writerow([_fmt(row.get(c)) for c in self.columns]
                            + [self.config_hash, __version__, self.seed])
        return buf.getvalue()

    def write(self, out_dir) -> Path:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        path = out / f"{self.kind}.csv"
        path.write_text(self.to_csv())
        if self.timings:
            with open(out / "timings.csv", "w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(["label", "seconds"])
                for label, sec in self.timings:
                    w.writerow([label, f"{sec:.4f}"])
        return path


def _fmt(value):
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (list, tuple, np.ndarray)):
        return " ".join(_fmt(v) for v in np.ravel(value))
    if value is None:
        return ""
    return str(value)


def _context(spec: ExperimentSpec, what: str):
    class _Ctx:
        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            if exc is not None and isinstance(exc, MovingWellsError) and \
                    not isinstance(exc, ExperimentError):
                raise ExperimentError(
                    f"{spec.kind} ({spec.source or 'inline'}) {what}: "
                    f"{type(exc).__name__}: {exc}") from exc
            return False
    return _Ctx()


# --------------------------------------------------------------------------
# Γ-sweeps


def _best_interface(pot, candidates, geodesic):
    best = None
    for x in candidates:
        val = energy_infty(SharpConfig(jumps=[float(x)]), pot, geodesic=geodesic).total
        if best is None or val < best[1]:
            best = (float(x), val)
    return best


def _mass_interface(pot, m, n=2049):
    """Single-jump configuration with prescribed average; returns (x, sign, energy)."""
    d = pot.domain
    xs = np.linspace(d.lower[0], d.upper[0], n)
    lo, hi = pot.wells.wells(xs)
    vol = d.volume
    h = xs[1] - xs[0]

    def cum(v):
        return np.concatenate([[0.0], np.cumsum(0.5 * (v[1:] + v[:-1]) * h)])

    clo, chi = cum(lo[:, 0]), cum(hi[:, 0])
    options = []
    for sign in (-1, 1):
        left, right = (clo, chi) if sign < 0 else (chi, clo)

        def mass(x, left=left, right=right):
            return (np.interp(x, xs, left) + right[-1] - np.interp(x, xs, right)) / vol - m[0]

        a, b = d.lower[0] + 1e-9, d.upper[0] - 1e-9
        if mass(a) * mass(b) > 0:
            continue
        x = brentq(mass, a, b, xtol=1e-13)
        val = energy_infty(SharpConfig(jumps=[x], first_sign=sign), pot).total
        options.append((x, sign, val))
    if not options:
        raise ParameterError(f"no single-interface configuration has mass {m.tolist()}")
    return min(options, key=lambda o: o[2])


def run_gamma_sweep(spec: ExperimentSpec, constrained: bool | None = None) -> ExperimentResult:
    """Minimize the phase-field energy for each eps from a recovery warm start."""
    constrained = spec.kind == "gamma-sweep-mass" if constrained is None else constrained
    with _context(spec, "setup"):
        pot = build_potential_from(spec.section("potential"))
        if pot.domain.dim != 1:
            raise ParameterError("Γ-sweeps run on 1-D domains")
        n = int(spec.data.get("grid", 8192))
        rec_cfg = RecoveryConfig(**spec.section("recovery"))
        min_cfg = spec.section("minimize")
        geodesic = spec.section("geodesic")
        constraint = None
        sign = -1
        if constrained:
            m = as_array(spec.data.get("mass"), np.zeros(pot.M))
            constraint = MassConstraint(m)
            x0, sign, target = _mass_interface(pot, m)
        else:
            where = spec.data.get("interface", "auto")
            if where == "auto":
                lo, hi = pot.domain.lower[0], pot.domain.upper[0]
                cands = np.linspace(lo, hi, int(spec.data.get("candidates", 101)))[1:-1]
                x0, target = _best_interface(pot, cands, geodesic)
            else:
                x0 = float(where)
                target = energy_infty(SharpConfig(jumps=[x0]), pot, geodesic=geodesic).total
    if not spec.eps:
        raise ParameterError("a Γ-sweep needs a non-empty eps list")
    rows, timings, fields = [], [], {}
    for eps in sorted(spec.eps, reverse=True):
        with _context(spec, f"eps={eps:g}"):
            t0 = time.perf_counter()
            rec = build_recovery(pot, x0, eps, rec_cfg, n, geodesic=geodesic)
            u0 = rec.field
            if sign > 0:
                u0 = u0.with_values(-u0.values + 2 * pot.wells.center(u0.grid.nodes))
            if constrained:
                u0 = project_mass(Field(u0.grid, u0.values, None), constraint)
            e_rec = energy_eps(u0, pot, eps)
            report = minimize(u0, pot, PhaseFieldConfig(eps=eps, **min_cfg), constraint)
            energy = report.energies[-1]
            rows.append({
                "eps": eps, "n": n, "interface_target": x0, "target_energy": target,
                "recovery_energy": e_rec, "energy": energy, "gap": abs(energy - target),
                "rel_gap": abs(energy - target) / target,
                "interface": interface_location(report.field, pot),
                "iterations": report.iterations, "reason": report.reason,
                "max_mass_residual": max(report.residuals) if constrained else 0.0,
            })
            timings.append((f"eps={eps:g}", time.perf_counter() - t0))
            fields[eps] = report.field
    return ExperimentResult(spec.kind, GAMMA_COLUMNS, rows, spec.hash, spec.seed, timings,
                            {"fields": fields, "potential": pot})


# --------------------------------------------------------------------------
# geodesic benchmark


def run_geodesic_bench(spec: ExperimentSpec) -> ExperimentResult:
    """Solve a batch of distance queries ``(x, p, q, eps_cert[, cap])``."""
    with _context(spec, "setup"):
        pot = build_potential_from(spec.section("potential"))
        settings = spec.section("geodesic")
        queries = spec.data.get("queries") or []
        if not queries:
            raise ParameterError("geodesic-bench needs a non-empty 'queries' list")
    rows, timings, curves = [], [], []
    for k, q in enumerate(queries):
        with _context(spec, f"query {k}"):
            x = as_array(q.get("x"), np.array([0.5 * (a + b) for a, b in
                                               zip(pot.domain.lower, pot.domain.upper)]))
            kw = {**settings, **{key: q[key] for key in ("eps_cert", "box_radius")
                                 if key in q}}
            query = GeodesicQuery(pot.at(x), q["p"], q["q"], **kw)
            cap = q.get("cap")
            t0 = time.perf_counter()
            res = (truncated_distance(query, TruncationCap(float(cap))) if cap is not None
                   else geodesic_distance(query))
            timings.append((f"query {k}", time.perf_counter() - t0))
            rows.append({"query": k, "x": x, "p": query.p, "q": query.q, "cap": cap,
                         "distance": res.distance, "length": res.length, "gap": res.gap,
                         "certified": res.certified, "iterations": res.iterations,
                         "grid_value": res.grid_value})
            curves.append(res.curve)
    return ExperimentResult(spec.kind, GEODESIC_COLUMNS, rows, spec.hash, spec.seed, timings,
                            {"curves": curves})


# --------------------------------------------------------------------------
# annular study


def run_annular_study(spec: ExperimentSpec) -> ExperimentResult:
    """Distance and Euclidean length between the annular wells for each ring count."""
    section = spec.section("annular")
    rings = [int(r) for r in spec.data.get("rings", [1, 2, 3, 4, 5, 6])]
    if any(r < 1 or r > 6 for r in rings):
        raise ParameterError("ring counts must lie in 1..6")
    settings = {"eps_cert": 1e-2, "box_radius": 1.1, "grid_nodes": 1201, "max_levels": 6,
                **spec.section("geodesic")}
    caps = [None] + [float(c) for c in spec.data.get("caps", [])]
    rows, timings, curves = [], [], {}
    for n in rings:
        with _context(spec, f"rings={n}"):
            pot = make_annular_potential(n, **section)
            W = pot.at([0.5])
            for cap in caps:
                query = GeodesicQuery(W, [0.0, 1.0], [0.0, 0.0], **settings)
                t0 = time.perf_counter()
                res = (geodesic_distance(query) if cap is None
                       else truncated_distance(query, TruncationCap(cap)))
                timings.append((f"rings={n} cap={cap}", time.perf_counter() - t0))
                rows.append({"rings": n, "cap": cap, "distance": res.distance,
                             "length": res.length, "gap": res.gap,
                             "certified": res.certified, "grid_value": res.grid_value})
                curves[(n, cap)] = res.curve
    return ExperimentResult(spec.kind, ANNULAR_COLUMNS, rows, spec.hash, spec.seed, timings,
                            {"curves": curves})


# --------------------------------------------------------------------------
# audits


def run_audit(spec: ExperimentSpec) -> ExperimentResult:
    """One row per hypothesis per listed potential."""
    entries = spec.data.get("potentials") or (
        [{"name": "potential", **spec.section("potential")}] if spec.data.get("potential")
        else [])
    if not entries:
        raise ParameterError("audit needs 'potential' or a 'potentials' list")
    sampling = SamplingSpec(**{"seed": spec.seed, **spec.section("sampling")})
    rows = []
    for entry in entries:
        name = entry.get("name", entry.get("family", "potential"))
        with _context(spec, f"potential {name}"):
            pot = build_potential_from(entry)
            report = audit_hypotheses(pot, sampling)
        for row in report.rows():
            rows.append({"family": name, "hypothesis": row["hypothesis"],
                         "passed": row["passed"], "worst": row["worst"],
                         "witness": json.dumps(row["witness"], sort_keys=True),
                         "note": row["note"]})
    return ExperimentResult(spec.kind, AUDIT_COLUMNS, rows, spec.hash, spec.seed)


RUNNERS = {
    "gamma-sweep": run_gamma_sweep,
    "gamma-sweep-mass": run_gamma_sweep,
    "geodesic-bench": run_geodesic_bench,
    "annular-study": run_annular_study,
    "audit": run_audit,
}


def run_experiment(spec: ExperimentSpec, out_dir=None, dump_fields: bool | None = None):
    result = RUNNERS[spec.kind](spec)
    if out_dir is not None:
        result.write(out_dir)
        if dump_fields if dump_fields is not None else spec.data.get("dump_fields", False):
            for eps, fld in result.artifacts.get("fields", {}).items():
                write_field(fld, Path(out_dir) / "fields" / f"eps_{eps:g}")
    return result
