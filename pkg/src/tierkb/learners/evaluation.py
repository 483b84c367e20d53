"""Cross-validated evaluation with the classic seven-metric report.

Error metrics follow the probability-residual convention: each prediction is
a class distribution, residuals are taken against the one-hot truth, averaged
over classes then instances; relative errors are normalized by the same
metric for a prior-distribution baseline predictor fitted per training fold.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from ..dataset import Dataset, FoldPlan


@dataclass(frozen=True)
class EvalReport:
    cci_pct: float
    ics_pct: float
    kappa: float
    mae: float
    rmse: float
    rae_pct: float
    rrse_pct: float
    confusion: tuple[tuple[int, ...], ...]  # [true][predicted]
    class_values: tuple[str, ...]
    train_time_s: float
    test_time_s: float

    def __post_init__(self):
        if abs(self.cci_pct + self.ics_pct - 100.0) > 1e-9:
            raise ValueError("correct and incorrect percentages must sum to 100")
        if not (-1.0 - 1e-9 <= self.kappa <= 1.0 + 1e-9):
            raise ValueError("kappa out of [-1, 1]")
        if min(self.mae, self.rmse, self.rae_pct, self.rrse_pct) < 0:
            raise ValueError("error metrics must be nonnegative")

    @property
    def n_instances(self) -> int:
        return int(sum(sum(row) for row in self.confusion))

    def summary(self) -> str:
        lines = [
            f"Correctly Classified Instances   {self.cci_pct:.4f} %",
            f"Incorrectly Classified Instances {self.ics_pct:.4f} %",
            f"Kappa statistic                  {self.kappa:.4f}",
            f"Mean absolute error              {self.mae:.4f}",
            f"Root mean squared error          {self.rmse:.4f}",
            f"Relative absolute error          {self.rae_pct:.4f} %",
            f"Root relative squared error      {self.rrse_pct:.4f} %",
            f"Total Number of Instances        {self.n_instances}",
            "",
            "Confusion matrix (rows: actual, columns: predicted):",
        ]
        width = max(len(v) for v in self.class_values)
        for i, row in enumerate(self.confusion):
            cells = " ".join(f"{c:5d}" for c in row)
            lines.append(f"  {self.class_values[i]:<{width}} {cells}")
        return "\n".join(lines)


@dataclass(frozen=True)
class PriorModel:
    """Baseline predictor: emits the smoothed training class prior everywhere."""

    schema: object
    priors: np.ndarray

    def predict_proba(self, values) -> np.ndarray:
        return self.priors


def laplace_priors(train: Dataset) -> np.ndarray:
    k = len(train.schema.class_values)
    counts = np.bincount(train.label_indices(), minlength=k)
    return (counts + 1.0) / (len(train) + k)


def train_zero_r(train: Dataset) -> PriorModel:
    return PriorModel(schema=train.schema, priors=laplace_priors(train))


def _kappa(confusion: np.ndarray) -> float:
    n = confusion.sum()
    if n == 0:
        return 0.0
    po = np.trace(confusion) / n
    pe = float((confusion.sum(axis=1) * confusion.sum(axis=0)).sum()) / (n * n)
    if abs(1.0 - pe) < 1e-12:
        # single-class degenerate limit
        return 1.0 if abs(po - 1.0) < 1e-12 else 0.0
    return float((po - pe) / (1.0 - pe))


def evaluate_cv(fit, dataset: Dataset, plan: FoldPlan) -> EvalReport:
    """Train on each fold complement, score the held-out fold, pool results.

    ``fit`` maps a training Dataset to a model exposing ``predict_proba``.
    """
    if len(plan.assignments) != len(dataset):
        raise ValueError("fold plan does not cover dataset")
    if not dataset.all_labeled():
        raise ValueError("evaluation requires a fully labeled dataset")
    k = len(dataset.schema.class_values)
    confusion = np.zeros((k, k), dtype=int)
    abs_sum = sq_sum = base_abs_sum = base_sq_sum = 0.0
    n_scored = 0
    train_time = test_time = 0.0

    for fold in range(plan.n):
        train_idx, test_idx = plan.train_test(fold)
        train_ds = dataset.subset(train_idx)
        t0 = time.perf_counter()
        model = fit(train_ds)
        train_time += time.perf_counter() - t0
        baseline = laplace_priors(train_ds)

        t0 = time.perf_counter()
        for i in test_idx:
            inst = dataset.instances[i]
            truth = dataset.schema.class_index(inst.label)
            p = np.asarray(model.predict_proba(inst.values))
            onehot = np.zeros(k)
            onehot[truth] = 1.0
            confusion[truth, int(np.argmax(p))] += 1
            abs_sum += float(np.abs(p - onehot).sum()) / k
            sq_sum += float(((p - onehot) ** 2).sum()) / k
            base_abs_sum += float(np.abs(baseline - onehot).sum()) / k
            base_sq_sum += float(((baseline - onehot) ** 2).sum()) / k
            n_scored += 1
        test_time += time.perf_counter() - t0

    cci = 100.0 * np.trace(confusion) / n_scored
    mae = abs_sum / n_scored
    rmse = float(np.sqrt(sq_sum / n_scored))
    base_mae = base_abs_sum / n_scored
    base_rmse = float(np.sqrt(base_sq_sum / n_scored))
    return EvalReport(
        cci_pct=float(cci),
        ics_pct=float(100.0 - cci),
        kappa=_kappa(confusion),
        mae=mae,
        rmse=rmse,
        rae_pct=100.0 * mae / base_mae if base_mae > 0 else 0.0,
        rrse_pct=100.0 * rmse / base_rmse if base_rmse > 0 else 0.0,
        confusion=tuple(tuple(int(c) for c in row) for row in confusion),
        class_values=dataset.schema.class_values,
        train_time_s=train_time,
        test_time_s=test_time,
    )
