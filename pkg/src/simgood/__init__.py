"""Similarity-based classification with landmark embeddings and robustness bounds."""

from .data import (
    LabeledSample,
    UnitBallRescaleWarning,
    gen_circles,
    gen_two_gaussians,
    load_csv,
    save_csv,
)
from .embedding import (
    EmbeddedSample,
    LandmarkSet,
    draw_landmarks,
    embed,
    landmark_count,
    load_landmarks,
    save_landmarks,
)
from .errors import NumericError, SimgoodError, UsageError
from .experiment import ExperimentConfig, TrialResult, run_experiment, run_trial
from .goodness import GoodnessEstimate, estimate_goodness, g_value
from .robustness import (
    BoundReport,
    CoverPartition,
    build_cover,
    empirical_gap,
    generalization_bound,
    robustness_epsilon,
    same_cell_loss_gap,
)
from .similarity import (
    LipschitzAudit,
    RangeReport,
    SimilarityFunction,
    bilinear_similarity,
    eval_similarity,
    eval_similarity_rows,
    exponential_similarity,
    lipschitz_audit,
    lipschitz_constant,
    load_similarity,
    mahalanobis_similarity,
    sample_unit_ball,
    save_similarity,
    similarity_from_json,
    similarity_matrix,
    similarity_to_json,
    spectral_norm,
    validate_range,
)
from .solver import (
    SeparatorModel,
    TrainReport,
    empirical_risk,
    instantaneous_loss,
    load_model,
    losses,
    model_from_json,
    model_to_json,
    project_l1_ball,
    sample_l1_ball,
    save_model,
    train_lp,
    train_subgradient,
)

__version__ = "0.1.0"
