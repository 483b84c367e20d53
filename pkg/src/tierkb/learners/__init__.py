"""Statistical tier: tree, naive-Bayes, and neural-network learners plus the
cross-validation harness and model serialization."""

from __future__ import annotations

import numpy as np

from ..dataset import Instance
from .bayes import NaiveBayesModel, train_nb
from .evaluation import EvalReport, PriorModel, evaluate_cv, laplace_priors, train_zero_r
from .mlp import MlpModel, MlpParams, train_mlp
from .tree import DecisionTree, J48Params, Leaf, Split, train_j48
from .io import load_model, save_model

ALGORITHMS = ("j48", "nb", "mlp", "zeror")


def predict(model, instance) -> np.ndarray:
    """Class-probability distribution for one instance, any model kind."""
    values = instance.values if isinstance(instance, Instance) else instance
    return np.asarray(model.predict_proba(values))


def predict_label(model, instance) -> str:
    """Argmax class of predict(); ties resolve to the lowest class index."""
    p = predict(model, instance)
    return model.schema.class_values[int(np.argmax(p))]


def make_fit(algo: str, seed: int = 0):
    """Map an algorithm name to a fit callable Dataset -> model."""
    if algo == "j48":
        return lambda train: train_j48(train)
    if algo == "nb":
        return lambda train: train_nb(train)
    if algo == "mlp":
        return lambda train: train_mlp(train, MlpParams(seed=seed))
    if algo == "zeror":
        return train_zero_r
    raise ValueError(f"unknown algorithm {algo!r}; expected one of {ALGORITHMS}")


__all__ = [
    "ALGORITHMS",
    "DecisionTree",
    "EvalReport",
    "J48Params",
    "Leaf",
    "MlpModel",
    "MlpParams",
    "NaiveBayesModel",
    "PriorModel",
    "Split",
    "evaluate_cv",
    "laplace_priors",
    "load_model",
    "make_fit",
    "predict",
    "predict_label",
    "save_model",
    "train_j48",
    "train_mlp",
    "train_nb",
    "train_zero_r",
]
