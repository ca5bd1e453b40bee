"""Phase-field and geodesic-distance tools for double-well energies whose wells
move with the spatial variable."""

__version__ = "0.1.0"

from .domain import SpatialDomain  # noqa: E402
from .errors import (DegenerateInputError, DomainError, MovingWellsError,  # noqa: E402
                     ParameterError, UsageError)
from .potentials import (Adjustment, GrowthFunction, Potential, WellField,  # noqa: E402
                         build_potential)
from .annular import make_annular_potential  # noqa: E402
from .audit import SamplingSpec, audit_hypotheses  # noqa: E402
from .geodesics import (GeodesicQuery, GeodesicResult, Polyline, TruncationCap,  # noqa: E402
                        adapted_distance, curve_energy, geodesic_distance, polar_arc,
                        scalar_sigma_oracle, truncated_distance, verify_locality)
from .profiles import Profile, ProfileConfig, profile_energy, reparameterize  # noqa: E402
from .phasefield import (Field, Grid, MassConstraint, PhaseFieldConfig,  # noqa: E402
                         RecoveryConfig, build_recovery, build_recovery_1d, bump_constant,
                         energy_eps, gradient_eps, mass_correction_bump, minimize)
from .sharp import SharpConfig, assign_phases, energy_infty, phase_indicator  # noqa: E402

__all__ = [
    "__version__",
    "SpatialDomain",
    "DegenerateInputError",
    "DomainError",
    "MovingWellsError",
    "ParameterError",
    "UsageError",
    "Adjustment",
    "GrowthFunction",
    "Potential",
    "WellField",
    "build_potential",
    "make_annular_potential",
    "SamplingSpec",
    "audit_hypotheses",
    "GeodesicQuery",
    "GeodesicResult",
    "Polyline",
    "TruncationCap",
    "adapted_distance",
    "curve_energy",
    "geodesic_distance",
    "polar_arc",
    "scalar_sigma_oracle",
    "truncated_distance",
    "verify_locality",
    "Profile",
    "ProfileConfig",
    "profile_energy",
    "reparameterize",
    "Field",
    "Grid",
    "MassConstraint",
    "PhaseFieldConfig",
    "RecoveryConfig",
    "build_recovery",
    "build_recovery_1d",
    "bump_constant",
    "energy_eps",
    "gradient_eps",
    "mass_correction_bump",
    "minimize",
    "SharpConfig",
    "assign_phases",
    "energy_infty",
    "phase_indicator",
]
