"""Decision-tree learner: binary numeric splits by gain ratio with pessimistic
post-pruning, in the style of the classic C4.5 family.

Splits are chosen among midpoints between adjacent sorted attribute values
whose neighbourhoods mix classes; the per-attribute best gain is corrected by
the log2(candidate-count)/n term, attributes must reach the average corrected
gain before competing on gain ratio, and pruning replaces subtrees whose
pessimistic error estimate does not beat the collapsed leaf's.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from statistics import NormalDist

import numpy as np

from ..dataset import Dataset, DatasetSchema
from ..errors import EmptyDatasetError, SchemaError


@dataclass(frozen=True)
class J48Params:
    min_leaf: int = 2
    confidence: float = 0.25

    def __post_init__(self):
        if self.min_leaf < 1:
            raise ValueError("min_leaf must be >= 1")
        if not (0.0 < self.confidence <= 0.5):
            raise ValueError("confidence must lie in (0, 0.5]")


@dataclass(frozen=True)
class Leaf:
    """Terminal node: majority label plus the training class counts it covers."""

    label: str
    label_index: int
    counts: tuple[float, ...]

    @property
    def coverage(self) -> float:
        return float(sum(self.counts))

    @property
    def misclassified(self) -> float:
        return self.coverage - self.counts[self.label_index]


@dataclass(frozen=True)
class Split:
    """Internal node: instances with value <= threshold go left, else right."""

    attribute: int
    threshold: float
    left: "TreeNode"
    right: "TreeNode"

    def __post_init__(self):
        if not math.isfinite(self.threshold):
            raise ValueError("split threshold must be finite")


TreeNode = Leaf | Split


@dataclass(frozen=True)
class DecisionTree:
    root: TreeNode
    schema: DatasetSchema
    params: J48Params

    def predict_proba(self, values) -> np.ndarray:
        """Class distribution at the reached leaf, Laplace-smoothed."""
        values = np.asarray(values, dtype=float)
        if values.shape != (len(self.schema.attributes),):
            raise SchemaError(
                f"expected {len(self.schema.attributes)} attribute values, got {values.shape}"
            )
        node = self.root
        while isinstance(node, Split):
            node = node.left if values[node.attribute] <= node.threshold else node.right
        counts = np.asarray(node.counts)
        return (counts + 1.0) / (counts.sum() + len(counts))

    def predict_label(self, values) -> str:
        return self.schema.class_values[int(np.argmax(self.predict_proba(values)))]

    def leaves(self) -> list[Leaf]:
        """All leaves in left-to-right order."""
        out: list[Leaf] = []

        def walk(node):
            if isinstance(node, Leaf):
                out.append(node)
            else:
                walk(node.left)
                walk(node.right)

        walk(self.root)
        return out

    def paths(self) -> list[tuple[list[tuple[int, float, bool]], Leaf]]:
        """Root-to-leaf paths as ([(attribute, threshold, is_le), ...], leaf)."""
        out = []

        def walk(node, prefix):
            if isinstance(node, Leaf):
                out.append((list(prefix), node))
            else:
                walk(node.left, prefix + [(node.attribute, node.threshold, True)])
                walk(node.right, prefix + [(node.attribute, node.threshold, False)])

        walk(self.root, [])
        return out

    def node_count(self) -> int:
        def count(node):
            if isinstance(node, Leaf):
                return 1
            return 1 + count(node.left) + count(node.right)

        return count(self.root)

    def training_errors(self) -> float:
        return float(sum(leaf.misclassified for leaf in self.leaves()))

    def to_text(self) -> str:
        """Indented dump: `attr <= v` / `attr > v` lines, leaves as `: label (N/E)`."""
        names = self.schema.attribute_names
        lines: list[str] = []

        def weight(v: float) -> str:
            return f"{v:.1f}" if v == int(v) else f"{v:.2f}"

        def leaf_text(leaf: Leaf) -> str:
            body = f"{leaf.label} ({weight(leaf.coverage)}"
            if leaf.misclassified:
                body += f"/{weight(leaf.misclassified)}"
            return body + ")"

        def walk(node, depth):
            indent = "|   " * depth
            for op, child in (("<=", node.left), (">", node.right)):
                head = f"{indent}{names[node.attribute]} {op} {repr(node.threshold)}"
                if isinstance(child, Leaf):
                    lines.append(f"{head}: {leaf_text(child)}")
                else:
                    lines.append(head)
                    walk(child, depth + 1)

        if isinstance(self.root, Leaf):
            return f": {leaf_text(self.root)}"
        walk(self.root, 0)
        return "\n".join(lines)


def _entropy(counts: np.ndarray) -> float:
    n = counts.sum()
    if n <= 0:
        return 0.0
    p = counts[counts > 0] / n
    return float(-(p * np.log2(p)).sum())


def _make_leaf(counts: np.ndarray, class_values) -> Leaf:
    idx = int(np.argmax(counts))  # argmax takes the lowest index on ties
    return Leaf(label=class_values[idx], label_index=idx, counts=tuple(float(c) for c in counts))


def _best_attribute_split(v: np.ndarray, y: np.ndarray, n_classes: int, min_leaf: int):
    """Best boundary midpoint for one attribute.

    Returns (corrected_gain, gain_ratio, threshold) or None when no candidate
    survives the min_leaf constraint or the candidate-count gain correction.
    """
    order = np.argsort(v, kind="stable")
    vs, ys = v[order], y[order]
    n = len(vs)
    # group rows by distinct value; remember each group's class set
    starts = [0] + [i for i in range(1, n) if vs[i] != vs[i - 1]]
    bounds = starts[1:] + [n]
    groups = [set(ys[a:b].tolist()) for a, b in zip(starts, bounds)]

    total = np.bincount(ys, minlength=n_classes).astype(float)
    h_parent = _entropy(total)
    left = np.zeros(n_classes)
    right = total.copy()
    best_gain, best_at = -math.inf, None
    n_candidates = 0
    for g in range(len(starts) - 1):
        for i in range(starts[g], bounds[g]):
            left[ys[i]] += 1
            right[ys[i]] -= 1
        pos = bounds[g]
        if len(groups[g] | groups[g + 1]) < 2:
            continue
        if pos < min_leaf or n - pos < min_leaf:
            continue
        n_candidates += 1
        gain = h_parent - (pos / n) * _entropy(left) - ((n - pos) / n) * _entropy(right)
        if gain > best_gain:
            best_gain, best_at = gain, (g, pos)
    if best_at is None:
        return None
    gain = best_gain - math.log2(n_candidates) / n
    if gain <= 0.0:
        return None
    g, pos = best_at
    threshold = (vs[bounds[g] - 1] + vs[bounds[g]]) / 2.0
    p = pos / n
    split_info = -(p * math.log2(p) + (1 - p) * math.log2(1 - p))
    return gain, gain / split_info, float(threshold)


def _grow(X: np.ndarray, y: np.ndarray, n_classes: int, params: J48Params, class_values):
    counts = np.bincount(y, minlength=n_classes).astype(float)
    n = len(y)
    if n < 2 * params.min_leaf or counts.max() == n:
        return _make_leaf(counts, class_values)

    candidates = []
    for j in range(X.shape[1]):
        res = _best_attribute_split(X[:, j], y, n_classes, params.min_leaf)
        if res is not None:
            candidates.append((j,) + res)
    if not candidates:
        return _make_leaf(counts, class_values)

    avg_gain = sum(c[1] for c in candidates) / len(candidates)
    best = None
    for j, gain, ratio, thr in candidates:
        if gain + 1e-12 < avg_gain:
            continue
        if best is None or ratio > best[1]:
            best = (j, ratio, thr)
    if best is None:
        return _make_leaf(counts, class_values)

    j, _, thr = best
    mask = X[:, j] <= thr
    left = _grow(X[mask], y[mask], n_classes, params, class_values)
    right = _grow(X[~mask], y[~mask], n_classes, params, class_values)
    return Split(attribute=j, threshold=thr, left=left, right=right)


def _added_errors(n: float, e: float, cf: float) -> float:
    """Pessimistic extra errors for a leaf with n instances and e mistakes,
    via the one-sided normal upper confidence bound on the error rate."""
    if n <= 0:
        return 0.0
    if e < 1.0:
        base = n * (1.0 - cf ** (1.0 / n))
        if e == 0.0:
            return base
        return base + e * (_added_errors(n, 1.0, cf) - base)
    if e + 0.5 >= n:
        return max(n - e, 0.0)
    z = NormalDist().inv_cdf(1.0 - cf)
    f = (e + 0.5) / n
    r = (f + z * z / (2 * n) + z * math.sqrt(f / n - f * f / n + z * z / (4 * n * n))) / (
        1.0 + z * z / n
    )
    return r * n - e


def _node_counts(node: TreeNode, n_classes: int) -> np.ndarray:
    if isinstance(node, Leaf):
        return np.asarray(node.counts)
    return _node_counts(node.left, n_classes) + _node_counts(node.right, n_classes)


def _subtree_error(node: TreeNode, cf: float) -> float:
    if isinstance(node, Leaf):
        return node.misclassified + _added_errors(node.coverage, node.misclassified, cf)
    return _subtree_error(node.left, cf) + _subtree_error(node.right, cf)


def _prune(node: TreeNode, cf: float, n_classes: int, class_values) -> TreeNode:
    if isinstance(node, Leaf):
        return node
    node = replace(
        node,
        left=_prune(node.left, cf, n_classes, class_values),
        right=_prune(node.right, cf, n_classes, class_values),
    )
    counts = _node_counts(node, n_classes)
    collapsed = _make_leaf(counts, class_values)
    leaf_err = collapsed.misclassified + _added_errors(collapsed.coverage, collapsed.misclassified, cf)
    if leaf_err <= _subtree_error(node, cf) + 0.1:
        return collapsed
    return node


def train_j48(train: Dataset, params: J48Params = J48Params()) -> DecisionTree:
    """Grow and prune a decision tree on a fully labeled numeric dataset."""
    if len(train) == 0:
        raise EmptyDatasetError("cannot train a tree on an empty dataset")
    if not train.all_labeled():
        raise ValueError("training dataset must be fully labeled")
    X = train.features()
    y = train.label_indices()
    n_classes = len(train.schema.class_values)
    root = _grow(X, y, n_classes, params, train.schema.class_values)
    root = _prune(root, params.confidence, n_classes, train.schema.class_values)
    return DecisionTree(root=root, schema=train.schema, params=params)
