"""Robust estimation of Ising interaction strength on known networks.

Estimate the inverse-temperature-like coupling parameter from a single
(possibly corrupted) spin configuration observed on a known graph. The
estimator family trades a little statistical efficiency for bounded
sensitivity to adversarially corrupted nodes; the zero setting of the
robustness weight recovers maximum pseudolikelihood.
"""

__version__ = "0.1.0"

from .contamination import ContaminationScheme, contaminate
from .errors import (
    AsymmetryConflict,
    DegenerateDenominator,
    DimensionMismatch,
    EmptyGraph,
    IndexOutOfRange,
    InvalidSpec,
    IsingRobustError,
    LambdaZero,
    NoUsableTrainingFits,
    ParseError,
    TooLargeForEnumeration,
    UsageError,
)
from .estimator import (
    EstimateOutcome,
    EstimatorSettings,
    dpd_objective,
    dpd_weight,
    dpd_weight_dbeta,
    estimate,
    estimate_lambda_grid,
    kl_to_model,
    log_pseudolikelihood,
    score,
    score_derivative_parts,
)
from .experiments import (
    ExperimentReport,
    ExperimentSpec,
    LooAccuracy,
    ReportRow,
    SplitAccuracy,
    load_experiment_spec,
    predict_leave_one_out,
    predict_train_test,
    run_experiment,
)
from .graphs import (
    EnsembleSpec,
    InteractionMatrix,
    build_ensemble,
    load_edge_list,
    save_edge_list,
    spectral_norm_upper_bound,
)
from .model import (
    ExactModelSummary,
    conditional_prob_plus,
    exact_summary,
    hamiltonian,
    local_fields,
    read_samples_csv,
    read_spins,
    validate_spins,
    write_samples_csv,
    write_spins,
)
from .robustness import (
    GesResult,
    PsiEvaluation,
    ges,
    ges_curve,
    influence_function,
    psi_sum,
    psi_tilde,
    sensitivity_denominator,
)
from .sampler import GibbsChain, GibbsSettings, gibbs_sample

__all__ = [name for name in dir() if not name.startswith("_")]
