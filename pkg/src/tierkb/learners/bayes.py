"""Gaussian naive-Bayes classifier over numeric attributes."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..dataset import Dataset, DatasetSchema
from ..errors import EmptyDatasetError, SchemaError

VARIANCE_FLOOR = 1e-6


@dataclass(frozen=True)
class NaiveBayesModel:
    schema: DatasetSchema
    priors: tuple[float, ...]
    means: tuple[tuple[float, ...], ...]  # [class][attribute]
    variances: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        if abs(sum(self.priors) - 1.0) > 1e-9:
            raise ValueError("class priors must sum to 1")
        if any(v < VARIANCE_FLOOR for row in self.variances for v in row):
            raise ValueError("variance below floor")

    def predict_proba(self, values) -> np.ndarray:
        """Posterior over classes; computed in log space, normalized to sum 1."""
        values = np.asarray(values, dtype=float)
        if values.shape != (len(self.schema.attributes),):
            raise SchemaError(
                f"expected {len(self.schema.attributes)} attribute values, got {values.shape}"
            )
        mu = np.asarray(self.means)
        var = np.asarray(self.variances)
        log_lik = -0.5 * (np.log(2.0 * math.pi * var) + (values - mu) ** 2 / var).sum(axis=1)
        log_post = np.log(self.priors) + log_lik
        log_post -= log_post.max()
        p = np.exp(log_post)
        return p / p.sum()


def train_nb(train: Dataset) -> NaiveBayesModel:
    """Fit Laplace-smoothed priors and per-(class, attribute) Gaussians.

    Classes absent from the training data fall back to a standard-normal
    likelihood; their smoothed prior keeps them selectable in principle only.
    """
    if len(train) == 0:
        raise EmptyDatasetError("cannot train naive Bayes on an empty dataset")
    if not train.all_labeled():
        raise ValueError("training dataset must be fully labeled")
    X = train.features()
    y = train.label_indices()
    n, a = X.shape
    k = len(train.schema.class_values)
    priors = tuple((np.bincount(y, minlength=k) + 1.0) / (n + k))
    means, variances = [], []
    for c in range(k):
        rows = X[y == c]
        if len(rows) == 0:
            means.append((0.0,) * a)
            variances.append((1.0,) * a)
            continue
        mu = rows.mean(axis=0)
        var = rows.var(axis=0, ddof=1) if len(rows) > 1 else np.zeros(a)
        var = np.maximum(var, VARIANCE_FLOOR)
        means.append(tuple(float(v) for v in mu))
        variances.append(tuple(float(v) for v in var))
    return NaiveBayesModel(
        schema=train.schema,
        priors=priors,
        means=tuple(means),
        variances=tuple(variances),
    )
