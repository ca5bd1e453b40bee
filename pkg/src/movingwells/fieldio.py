"""Field dumps: raw little-endian float64 node values plus a small text header."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .domain import SpatialDomain
from .phasefield import Field, Grid


def _paths(stem: Path) -> tuple[Path, Path]:
    # stems such as "eps_0.02" contain dots, so extensions are appended
    return stem.parent / f"{stem.name}.bin", stem.parent / f"{stem.name}.hdr"


def write_field(field: Field, stem) -> tuple[Path, Path]:
    """Write ``<stem>.bin`` (C-order values) and ``<stem>.hdr``."""
    stem = Path(stem)
    stem.parent.mkdir(parents=True, exist_ok=True)
    data, header = _paths(stem)
    field.values.astype("<f8").tofile(data)
    g = field.grid
    lines = [
        "dtype float64-le",
        "order C",
        "shape " + " ".join(str(k) for k in g.shape),
        f"components {field.M}",
        "lower " + " ".join(repr(v) for v in g.domain.lower),
        "upper " + " ".join(repr(v) for v in g.domain.upper),
        "spacing " + " ".join(repr(float(h)) for h in g.spacing),
        f"bc {field.bc}",
    ]
    header.write_text("\n".join(lines) + "\n")
    return data, header


def read_field(stem) -> Field:
    data, header = _paths(Path(stem))
    meta = {}
    for line in header.read_text().splitlines():
        key, _, rest = line.partition(" ")
        meta[key] = rest.split()
    shape = tuple(int(k) for k in meta["shape"])
    M = int(meta["components"][0])
    domain = SpatialDomain([float(v) for v in meta["lower"]], [float(v) for v in meta["upper"]])
    grid = Grid(domain, shape)
    values = np.fromfile(data, dtype="<f8").reshape(shape + (M,))
    fixed = grid.boundary.copy() if meta.get("bc", ["free"])[0] == "fixed" else None
    return Field(grid, values, fixed)
