"""Implicit (proximal) online learning with adaptive and doubling-trick rates.

Closed-form implicit updates for hinge, absolute, square, scaled-quadratic and
linear losses over Euclidean domains; online learners (explicit and implicit,
fixed, decaying, adaptive and doubling rate schedules); regret / temporal
variability metrics with bound certificates; LIBSVM ingestion and synthetic
sequence generators; and a CLI harness for the experiment protocols.
"""

from .geometry import Ball, MirrorSetup, Unconstrained, bregman, bregman_diameter_sq, project
from .losses import (
    Absolute,
    Hinge,
    Linear,
    Loss,
    Quad1D,
    Square,
    evaluate,
    losses_equal,
    pairwise_variability_term,
    subgradient,
)
from .prox import ProxResult, implicit_step, solve_ball_alpha
from .learners import ALGORITHMS, Learner, LearnerConfig, StepRecord, Trace, run
from .metrics import (
    BoundCertificate,
    best_fixed_comparator,
    certify_adaimplicit,
    certify_adaimplicit_lambda,
    certify_doubling,
    certify_implicit_const,
    certify_iomd_minimum,
    cumulative_losses,
    doubling_epoch_bound,
    regret,
    temporal_variability,
    total_loss,
)
from .data import (
    Dataset,
    ExperimentConfig,
    gen_fixed,
    gen_lower_bound,
    gen_sine,
    losses_from_dataset,
    parse_libsvm,
    preprocess,
    serialize_libsvm,
    shuffle_order,
)

__version__ = "0.1.0"

__all__ = [
    "Absolute",
    "ALGORITHMS",
    "Ball",
    "BoundCertificate",
    "Dataset",
    "ExperimentConfig",
    "Hinge",
    "Learner",
    "LearnerConfig",
    "Linear",
    "Loss",
    "MirrorSetup",
    "ProxResult",
    "Quad1D",
    "Square",
    "StepRecord",
    "Trace",
    "Unconstrained",
    "best_fixed_comparator",
    "bregman",
    "bregman_diameter_sq",
    "certify_adaimplicit",
    "certify_adaimplicit_lambda",
    "certify_doubling",
    "certify_implicit_const",
    "certify_iomd_minimum",
    "cumulative_losses",
    "doubling_epoch_bound",
    "evaluate",
    "gen_fixed",
    "gen_lower_bound",
    "gen_sine",
    "implicit_step",
    "losses_equal",
    "losses_from_dataset",
    "pairwise_variability_term",
    "parse_libsvm",
    "preprocess",
    "project",
    "regret",
    "run",
    "serialize_libsvm",
    "shuffle_order",
    "solve_ball_alpha",
    "subgradient",
    "temporal_variability",
    "total_loss",
]
