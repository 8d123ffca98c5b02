"""Tools for state-dependent delay equations whose solutions branch.

The package centers on problems x'(t) = f(x(t - g(x(t)))) with a prescribed
history, where a single history can admit a continuum of continuous solutions.
It provides closed-form solution families, residual verification, branch-aware
integration, delayed-argument classification, certificates for existence and
uniqueness questions, and 3d curve export, all wired to a small registry of
worked problems.
"""

from .classify import (ColorSegment, HolderEstimate, classify,
                       estimate_holder, find_nonlipschitz, s_dot)
from .closed_forms import (ClosedFormSolution, branch_exponent, clamp_window,
                           family_coefficient, family_window, key_family,
                           max_abs_residual, residual, residual_grid,
                           sup_difference)
from .errors import (DegenerateFitError, DelayRangeError, DomainError,
                     ExtrapolationWarning, InapplicableError, IntegrationAbort,
                     NonDifferentiableError, SddError, SingularPivotError)
from .geom import Curve3D, curve_to_csv, curve_to_json, lift, plane_residual, surface_residual
from .model import (Constant, DelaySpec, Full, InitialFunction, Linear,
                    Polynomial, PowerCusp, PowerLeft, PowerRight, PureDelay,
                    SddProblem, Segment, ValidationReport, delayed_argument,
                    effective_rhs, eval_g, eval_g_prime, eval_phi,
                    validate_problem)
from .redcert import (RedCertificate, RedUniquenessReport, RedVerification,
                      red_certificate, red_uniqueness_check, verify_red)
from .registry import (RegistryEntry, REGISTRY, build_problem,
                       const_phi_solution, entry_for, key_history,
                       resolve_params, solutions_for)
from .steps import (BranchSpec, Trajectory, integrate, red_branch, seed_branch,
                    trajectory_from_solution, trajectory_to_csv)
from .uniqueness import (RegionReport, TransformedPath, UniquenessCertificate,
                         integrate_transformed, prop1_region_check,
                         prop2_certificate, transformed_rhs, transformed_to_csv)

__version__ = "0.1.0"

__all__ = [
    "BranchSpec", "ClosedFormSolution", "ColorSegment", "Constant", "Curve3D",
    "DegenerateFitError", "DelayRangeError", "DelaySpec", "DomainError",
    "ExtrapolationWarning", "Full", "HolderEstimate", "InapplicableError",
    "InitialFunction", "IntegrationAbort", "Linear", "NonDifferentiableError",
    "Polynomial", "PowerCusp", "PowerLeft", "PowerRight", "PureDelay",
    "REGISTRY", "RedCertificate", "RedUniquenessReport", "RedVerification",
    "RegionReport", "RegistryEntry", "SddError", "SddProblem", "Segment",
    "SingularPivotError", "Trajectory", "TransformedPath",
    "UniquenessCertificate", "ValidationReport", "branch_exponent",
    "build_problem", "clamp_window", "classify", "const_phi_solution",
    "curve_to_csv", "curve_to_json", "delayed_argument", "effective_rhs",
    "entry_for", "estimate_holder", "eval_g", "eval_g_prime", "eval_phi",
    "family_coefficient", "family_window", "find_nonlipschitz", "integrate",
    "integrate_transformed", "key_family", "key_history", "lift",
    "max_abs_residual", "plane_residual", "prop1_region_check",
    "prop2_certificate", "red_branch", "red_certificate",
    "red_uniqueness_check", "residual", "residual_grid", "resolve_params",
    "s_dot", "seed_branch", "solutions_for", "sup_difference",
    "surface_residual", "trajectory_from_solution", "trajectory_to_csv",
    "transformed_rhs", "transformed_to_csv", "validate_problem", "verify_red",
    "__version__",
]
