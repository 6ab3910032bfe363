"""Differentially private feature selection, naive Bayes and ROC curves."""

from .dp import BudgetExhausted, PrivacyBudget, Receipt, make_rng
from .dataset import SparseDataset, load_sparse, generate_synthetic
from .scoring import ScoreKind, NeighborModel, score_table
from .classifier import NaiveBayesModel, PredictionSet, nb_train, evaluate_accuracy
from .roc import exact_roc, priroc, laplace_roc_baseline, theorem5_bounds

__version__ = "0.1.0"

__all__ = [
    "BudgetExhausted",
    "PrivacyBudget",
    "Receipt",
    "make_rng",
    "SparseDataset",
    "load_sparse",
    "generate_synthetic",
    "ScoreKind",
    "NeighborModel",
    "score_table",
    "NaiveBayesModel",
    "PredictionSet",
    "nb_train",
    "evaluate_accuracy",
    "exact_roc",
    "priroc",
    "laplace_roc_baseline",
    "theorem5_bounds",
]
