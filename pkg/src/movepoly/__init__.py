"""Analysis of parametric (moving) polyhedral sets.

The package projects points onto parameter-dependent polyhedra with full
Lagrange multiplier recovery, rewrites multipliers over independent
subfamilies, checks constant-rank and inner-semicontinuity conditions by
seeded sampling, and estimates multiplier bounds, error-bound constants and
set-Lipschitz moduli, including blow-up detection along sequences.
"""

from .analysis import (FixedSubfamilyPolicy, MinL1Policy, ReducedPolicy,
                       check_inner_semicontinuity, check_rcrcq,
                       detect_multiplier_blowup, estimate_aubin_modulus,
                       estimate_multiplier_bound, estimate_r_regularity,
                       fit_growth_exponent, parse_policy,
                       run_estimate_pipeline)
from .config import SamplingConfig, Tolerances
from .errors import (DependentFamilyError, DimensionMismatchError,
                     EnumerationGuardError, InfeasibleSetError, MovepolyError,
                     ProblemFormatError, ReductionError,
                     SamplingDiagnosticError, SolverLimitError)
from .linalg import (DependencyWitness, RankCertificate, VectorFamily,
                     dependency_witness, gram_determinant,
                     max_independent_subfamily, numerical_rank)
from .polyhedron import (AffineConstraint, MovingPolyhedron,
                         PolyhedronInstance)
from .problem_io import load_problem, parse_problem, serialize_problem
from .projection import (ProjectionResult, kkt_residual, project,
                         project_bruteforce)
from .reduction import (MinL1Result, MultiplierCertificate,
                        denormalize_multiplier, min_l1_multiplier,
                        normalize_multiplier, reduce_equalities,
                        reduce_positive_combination, reduced_multiplier)
from .scenarios import (Scenario, get_scenario, list_scenarios,
                        paper_example, random_scenario, rcrcq_violation)

__version__ = "0.1.0"

__all__ = [
    "AffineConstraint", "DependencyWitness", "DependentFamilyError",
    "DimensionMismatchError", "EnumerationGuardError", "FixedSubfamilyPolicy",
    "InfeasibleSetError", "MinL1Policy", "MinL1Result", "MovepolyError",
    "MovingPolyhedron", "MultiplierCertificate", "PolyhedronInstance",
    "ProblemFormatError", "ProjectionResult", "RankCertificate",
    "ReducedPolicy", "ReductionError", "SamplingConfig",
    "SamplingDiagnosticError", "Scenario", "SolverLimitError", "Tolerances",
    "VectorFamily", "check_inner_semicontinuity", "check_rcrcq",
    "denormalize_multiplier", "dependency_witness", "detect_multiplier_blowup",
    "estimate_aubin_modulus", "estimate_multiplier_bound",
    "estimate_r_regularity", "fit_growth_exponent", "get_scenario",
    "gram_determinant", "kkt_residual", "list_scenarios", "load_problem",
    "max_independent_subfamily", "min_l1_multiplier", "normalize_multiplier",
    "numerical_rank", "paper_example", "parse_policy", "parse_problem",
    "project", "project_bruteforce", "random_scenario", "rcrcq_violation",
    "reduce_equalities", "reduce_positive_combination", "reduced_multiplier",
    "run_estimate_pipeline", "serialize_problem",
]
