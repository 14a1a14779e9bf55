"""Coherence concurrence monotones, convex roofs and their verification."""
__version__ = "0.1.0"

from .conversion import ConversionResult, generalized_cnot, lambda_u, verify_conversion
from .errors import (CohconcError, DimensionError, InvalidStateError, InvariantError, ParameterError,
                     UnsupportedShapeError)
from .harness import (SuiteReport, check_phase_condition, strong_monotonicity_suite, theorem_suites)
from .io import load_state, save_state, state_from_dict, state_to_dict
from .monotones import (MonotoneId, coherence_k_concurrence_pure, coherence_rank, elementary_symmetric,
                        ent_k_concurrence_general, ent_k_concurrence_schmidt, evaluate_pure, l1_coherence,
                        qi_coherence_concurrence_pure)
from .multislit import (DetectorModel, DistinguishabilityReport, QuantonSpec, distinguishability,
                        distinguishable_slit_count, failure_chain, reduced_state)
from .roof import (CoherenceNumberEstimate, MonotoneEstimate, RoofProblem, coherence_k_concurrence_mixed,
                   coherence_number_estimate, decomposition_from_isometry, ent_k_concurrence_mixed,
                   minimize_roof, qi_concurrence_mixed)
from .states import (BipartitePureState, Decomposition, DensityMatrix, KrausSet, PureState, Violation,
                     eig_decompose, random_incoherent_kraus, random_mixed, random_pure, schmidt_coefficients,
                     validate_state)

__all__ = [
    "ConversionResult", "generalized_cnot", "lambda_u", "verify_conversion", "CohconcError",
    "DimensionError", "InvalidStateError", "InvariantError", "ParameterError", "UnsupportedShapeError",
    "SuiteReport", "check_phase_condition", "strong_monotonicity_suite", "theorem_suites", "load_state",
    "save_state", "state_from_dict", "state_to_dict", "MonotoneId", "coherence_k_concurrence_pure",
    "coherence_rank", "elementary_symmetric", "ent_k_concurrence_general", "ent_k_concurrence_schmidt",
    "evaluate_pure", "l1_coherence", "qi_coherence_concurrence_pure", "DetectorModel",
    "DistinguishabilityReport", "QuantonSpec", "distinguishability", "distinguishable_slit_count",
    "failure_chain", "reduced_state", "CoherenceNumberEstimate", "MonotoneEstimate", "RoofProblem",
    "coherence_k_concurrence_mixed", "coherence_number_estimate", "decomposition_from_isometry",
    "ent_k_concurrence_mixed", "minimize_roof", "qi_concurrence_mixed", "BipartitePureState",
    "Decomposition", "DensityMatrix", "KrausSet", "PureState", "Violation", "eig_decompose",
    "random_incoherent_kraus", "random_mixed", "random_pure", "schmidt_coefficients", "validate_state",
]
