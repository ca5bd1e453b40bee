"""Figures for experiment results, rendered next to the CSV tables."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _save(fig, path):
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return path


def plot_gamma(result, out: Path) -> list:
    eps = np.array(result.column("eps"))
    energy = np.array(result.column("energy"))
    target = result.rows[0]["target_energy"]
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.semilogx(eps, energy, "o-", label="min energy")
    ax.semilogx(eps, result.column("recovery_energy"), "s--", label="recovery", alpha=0.7)
    ax.axhline(target, color="k", lw=0.8, label="sharp-interface value")
    ax.set_xlabel("eps")
    ax.set_ylabel("energy")
    ax.invert_xaxis()
    ax.legend(frameon=False)
    paths = [_save(fig, out / f"{result.kind}_energy.png")]

    fig, ax = plt.subplots(figsize=(5, 3.5))
    for e, fld in sorted(result.artifacts.get("fields", {}).items()):
        x = fld.grid.nodes[..., 0]
        ax.plot(x, fld.values[..., 0], lw=1, label=f"eps={e:g}")
    ax.set_xlabel("x")
    ax.set_ylabel("u")
    ax.legend(frameon=False, fontsize=8)
    paths.append(_save(fig, out / f"{result.kind}_fields.png"))
    return paths


def _plot_curves(curves, labels, path, title=""):
    fig, ax = plt.subplots(figsize=(4.5, 4.5))
    for c, lab in zip(curves, labels):
        v = c.vertices
        if v.shape[1] == 1:
            ax.plot(v[:, 0], np.zeros(len(v)), lw=1, label=lab)
        else:
            ax.plot(v[:, 0], v[:, 1], lw=1, label=lab)
    ax.set_aspect("equal")
    ax.set_title(title)
    if len(curves) <= 8:
        ax.legend(frameon=False, fontsize=7)
    return _save(fig, path)


def plot_geodesics(result, out: Path) -> list:
    curves = result.artifacts.get("curves", [])
    labels = [f"query {r['query']}" for r in result.rows]
    return [_plot_curves(curves, labels, out / "geodesic-bench_curves.png")]


def plot_annular(result, out: Path) -> list:
    rows = [r for r in result.rows if r["cap"] is None]
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot([r["rings"] for r in rows], [r["length"] for r in rows], "o-")
    ax.set_xlabel("rings")
    ax.set_ylabel("Euclidean length of minimizer")
    paths = [_save(fig, out / "annular-study_length.png")]
    curves = result.artifacts.get("curves", {})
    keys = [k for k in curves if k[1] is None]
    paths.append(_plot_curves([curves[k] for k in keys], [f"{k[0]} rings" for k in keys],
                              out / "annular-study_curves.png"))
    return paths


def plot_audit(result, out: Path) -> list:
    fams = sorted({r["family"] for r in result.rows})
    hyps = sorted({r["hypothesis"] for r in result.rows})
    grid = np.zeros((len(fams), len(hyps)))
    for r in result.rows:
        grid[fams.index(r["family"]), hyps.index(r["hypothesis"])] = 1.0 if r["passed"] else 0.0
    fig, ax = plt.subplots(figsize=(1 + 0.6 * len(hyps), 1 + 0.4 * len(fams)))
    ax.imshow(grid, cmap="RdYlGn", vmin=0, vmax=1, aspect="auto")
    ax.set_xticks(range(len(hyps)), hyps)
    ax.set_yticks(range(len(fams)), fams)
    return [_save(fig, out / "audit_matrix.png")]


PLOTTERS = {
    "gamma-sweep": plot_gamma,
    "gamma-sweep-mass": plot_gamma,
    "geodesic-bench": plot_geodesics,
    "annular-study": plot_annular,
    "audit": plot_audit,
}


def render(result, out_dir) -> list:
    return PLOTTERS[result.kind](result, Path(out_dir) / "figures")
