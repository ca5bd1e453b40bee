"""YAML experiment configs.

A config is a mapping with a ``kind`` and kind-specific sections; see
``configs/`` for one example of each kind and the README for the schema.
Potentials are described by a ``potential`` section::

    potential:
      domain: {lower: [0.0], upper: [1.0], breakpoints: [0.5]}
      family: quartic            # or min_power (with q)
      q: 2.0
      wells:
        type: expression         # constant | affine | expression
        exprs: [["1 + (x - 0.5)**2 / 2"]]
      delta: 1.0                 # optional, sampled when omitted
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .domain import SpatialDomain
from .errors import ParameterError
from .potentials import Potential, WellField, build_potential

KINDS = ("gamma-sweep", "gamma-sweep-mass", "geodesic-bench", "annular-study", "audit")


def build_domain(spec: dict) -> SpatialDomain:
    return SpatialDomain(spec["lower"], spec["upper"],
                         breakpoints=tuple(spec.get("breakpoints", ())),
                         splitters=tuple(spec.get("splitters", ())))


def build_wells(domain: SpatialDomain, spec: dict) -> WellField:
    kind = spec.get("type", "constant")
    extra = {k: spec[k] for k in ("delta", "sup_norm") if k in spec}
    if kind == "constant":
        return WellField.constant(domain, spec["value"], **extra)
    if kind == "affine":
        return WellField.affine(domain, spec["a0"], spec["A"], **extra)
    if kind == "expression":
        return WellField.expression(domain, spec["exprs"], center=spec.get("center"), **extra)
    raise ParameterError(f"unknown well field type {kind!r}")


def build_potential_from(spec: dict) -> Potential:
    domain = build_domain(spec["domain"])
    wells_spec = dict(spec["wells"])
    if "delta" in spec:
        wells_spec.setdefault("delta", spec["delta"])
    wells = build_wells(domain, wells_spec)
    return build_potential(domain, wells, family=spec.get("family", "quartic"),
                           q=float(spec.get("q", 2.0)), name=spec.get("name", ""))


def config_hash(data: dict) -> str:
    """Short digest of the canonical JSON form of a config."""
    canon = json.dumps(data, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canon.encode()).hexdigest()[:12]


@dataclass
class ExperimentSpec:
    kind: str
    data: dict
    seed: int = 0
    eps: list = field(default_factory=list)
    source: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterError(f"unknown experiment kind {self.kind!r}; expected one of {KINDS}")
        eps = [float(e) for e in self.eps]
        if any(e <= 0 for e in eps) or any(b >= a for a, b in zip(eps[:-1], eps[1:])):
            raise ParameterError("eps list must be positive and strictly decreasing")
        self.eps = eps

    @property
    def hash(self) -> str:
        return config_hash(self.data)

    def section(self, name: str) -> dict:
        return dict(self.data.get(name) or {})

    @classmethod
    def from_dict(cls, data: dict, source: str = "") -> "ExperimentSpec":
        if not isinstance(data, dict) or "kind" not in data:
            raise ParameterError("config must be a mapping with a 'kind' entry")
        return cls(kind=data["kind"], data=data, seed=int(data.get("seed", 0)),
                   eps=data.get("eps", []), source=source)


def load_config(path) -> ExperimentSpec:
    path = Path(path)
    with open(path) as fh:
        data = yaml.safe_load(fh)
    return ExperimentSpec.from_dict(data, source=str(path))


def as_array(value, default=None):
    if value is None:
        return default
    return np.atleast_1d(np.asarray(value, dtype=float))
