"""Reduced integrable system of the SU(n,n) Heisenberg double.

The package builds the global section ``K_hat(z)`` of the reduced phase
space, recovers ``z`` from arbitrary points of the constraint surface,
integrates the projected free flows and checks the structural identities
numerically.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    BoundaryApproach,
    DegenerateSpectrum,
    DomainError,
    FactorizationFailed,
    IllConditioned,
    InvalidPoint,
    NotInPrimeSubset,
    NotOnConstraint,
    ParameterError,
    PhaseRecoveryAmbiguous,
    ReductionError,
)
from .model import ModelParams, kappa, momentum_value, nu, theta, zeta  # noqa: E402
from .numkit import cartan, iwasawa, j_cholesky, signature  # noqa: E402
from .phasespace import (  # noqa: E402
    GaugePair,
    angles_of_z,
    apply_gauge,
    constraint_residuals,
    gauge_of_angles,
    random_gauge,
    sample_section,
    section_global,
    section_local,
    z_from_constraint,
    z_of_angles,
)
from .dynamics import (  # noqa: E402
    Trajectory,
    conserved_spectrum,
    evolve_darboux,
    evolve_projection,
    expressibility_fit,
    free_flow,
    free_hamiltonian,
    lax,
    reduced_H1,
)
from .verify import CheckResult, SuiteReport, run_suite  # noqa: E402

__all__ = [
    "__version__",
    "ReductionError",
    "ParameterError",
    "DomainError",
    "InvalidPoint",
    "FactorizationFailed",
    "NotInPrimeSubset",
    "DegenerateSpectrum",
    "NotOnConstraint",
    "PhaseRecoveryAmbiguous",
    "IllConditioned",
    "BoundaryApproach",
    "ModelParams",
    "momentum_value",
    "nu",
    "theta",
    "zeta",
    "kappa",
    "signature",
    "j_cholesky",
    "iwasawa",
    "cartan",
    "GaugePair",
    "z_of_angles",
    "angles_of_z",
    "section_local",
    "section_global",
    "constraint_residuals",
    "gauge_of_angles",
    "random_gauge",
    "apply_gauge",
    "z_from_constraint",
    "sample_section",
    "Trajectory",
    "free_hamiltonian",
    "free_flow",
    "lax",
    "reduced_H1",
    "conserved_spectrum",
    "expressibility_fit",
    "evolve_projection",
    "evolve_darboux",
    "CheckResult",
    "SuiteReport",
    "run_suite",
]
