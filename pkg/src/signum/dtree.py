"""Decision-tree classifier over continuous features, built from scratch.

Splitting uses entropy (bits) as the impurity and information gain as the
split score.  Candidate thresholds are the midpoints between consecutive
distinct sorted values of each feature.  Every tie rule is frozen so that
training is fully deterministic:

  * equal gain across features: the lower feature index wins;
  * equal gain within a feature: the lower threshold wins;
  * equal class counts in a leaf: the lexicographically smallest label wins;
  * a sample equal to a threshold routes left (the <= side).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from signum.errors import SignumError


class EmptySet(SignumError):
    """Entropy of zero samples is undefined."""


class PartitionMismatch(SignumError):
    """Child partitions do not add up to the parent counts."""


class InconsistentDimensions(SignumError):
    """Training vectors do not all share one length."""


class DimensionMismatch(SignumError):
    """Prediction vector length differs from the training dimension."""


class UnknownGesture(SignumError):
    """A requested gesture id is not one of the trained classes."""


@dataclass(frozen=True)
class TreeParams:
    """The four tunable knobs: criterion, depth cap, and the two size floors."""

    criterion: str = "entropy"
    max_depth: int | None = 12
    min_samples_split: int = 2
    min_samples_leaf: int = 1

    def __post_init__(self):
        if self.criterion != "entropy":
            raise ValueError(f"unsupported criterion {self.criterion!r}")
        if self.max_depth is not None and self.max_depth < 1:
            raise ValueError("max_depth must be positive or None")
        if self.min_samples_split < 2:
            raise ValueError("min_samples_split must be >= 2")
        if self.min_samples_leaf < 1:
            raise ValueError("min_samples_leaf must be >= 1")
        if self.min_samples_leaf > self.min_samples_split:
            raise ValueError("min_samples_leaf must be <= min_samples_split")

    def to_dict(self) -> dict:
        return {
            "criterion": self.criterion,
            "max_depth": self.max_depth,
            "min_samples_split": self.min_samples_split,
            "min_samples_leaf": self.min_samples_leaf,
        }

    @classmethod
    def from_dict(cls, raw: Mapping) -> "TreeParams":
        return cls(
            criterion=raw.get("criterion", "entropy"),
            max_depth=raw.get("max_depth"),
            min_samples_split=int(raw.get("min_samples_split", 2)),
            min_samples_leaf=int(raw.get("min_samples_leaf", 1)),
        )


@dataclass(frozen=True)
class Leaf:
    class_counts: dict  # label -> count, only non-zero classes
    prediction: str
    depth: int


@dataclass(frozen=True)
class Internal:
    feature_index: int
    threshold: float
    left: "Leaf | Internal"   # samples with value <= threshold
    right: "Leaf | Internal"  # samples with value >  threshold


@dataclass(frozen=True)
class Prediction:
    """A predicted label plus the full per-gesture confidence map.

    ``per_gesture`` covers every trained class; classes absent from the
    reached leaf carry 0.0, and the values sum to 1.
    """

    label: str
    confidence: float
    per_gesture: dict


def entropy(class_counts: Mapping) -> float:
    """Shannon entropy in bits of a label count map; 0 for a pure set."""
    total = sum(class_counts.values())
    if total < 1:
        raise EmptySet("entropy needs at least one sample")
    h = 0.0
    for label in sorted(class_counts):
        count = class_counts[label]
        if count > 0:
            p = count / total
            h -= p * np.log2(p)
    return float(h)


def information_gain(parent_counts: Mapping, partition: Sequence[Mapping]) -> float:
    """Entropy reduction of splitting ``parent_counts`` into ``partition``."""
    merged: dict = {}
    for child in partition:
        for label, count in child.items():
            merged[label] = merged.get(label, 0) + count
    if merged != {k: v for k, v in parent_counts.items() if v}:
        raise PartitionMismatch("children do not partition the parent counts")
    n = sum(parent_counts.values())
    gain = entropy(parent_counts)
    for child in partition:
        nk = sum(child.values())
        if nk:
            gain -= (nk / n) * entropy(child)
    return float(gain)


def _mlog2m_table(n: int) -> np.ndarray:
    """Lookup table T[m] = m * log2(m) with T[0] = 0, for counts up to n.

    Split search scores every candidate with the identity
    H = log2(n) - (sum_c T[count_c]) / n, which avoids taking logarithms of
    per-split probabilities.  The brute-force reference in the test suite
    evaluates the same expression so that gain ties resolve identically.
    """
    m = np.arange(n + 1, dtype=np.float64)
    table = np.zeros(n + 1)
    table[1:] = m[1:] * np.log2(m[1:])
    return table


def _best_split_indexed(x: np.ndarray, y_idx: np.ndarray, n_classes: int,
                        params: TreeParams,
                        table: np.ndarray | None = None
                        ) -> tuple[int, float, float] | None:
    """Best (feature_index, threshold, gain) over all features and all
    midpoints between consecutive distinct sorted values, or None when no
    admissible split has positive gain.

    All candidates across all features are scored in one batched pass, with
    only the classes present in ``y_idx`` carried through the count tensors.
    Gain ties resolve to the lowest feature index, then the lowest
    threshold; both sides must keep at least min_samples_leaf samples.
    """
    n, d = x.shape
    min_leaf = params.min_samples_leaf
    if n < 2 * min_leaf or n < 2:
        return None
    if table is None:
        table = _mlog2m_table(n)

    present = np.unique(y_idx)  # sorted, so class order is preserved
    y_local = np.searchsorted(present, y_idx)
    c = len(present)

    order = np.argsort(x, axis=0, kind="stable")
    sorted_vals = np.take_along_axis(x, order, axis=0)
    sorted_y = y_local[order].T  # (d, n)

    one_hot = sorted_y[:, None, :] == np.arange(c)[None, :, None]
    left_counts = one_hot.cumsum(axis=2, dtype=np.int32)  # (d, c, n)
    total_counts = np.bincount(y_local, minlength=c)

    s_total = table[total_counts].sum()
    parent_h = np.log2(n) - s_total / n

    # position p means the left block holds the first p+1 sorted samples
    left_pos = left_counts[:, :, :-1]
    right_pos = total_counts.astype(np.int32)[None, :, None] - left_pos
    s_left = table[left_pos].sum(axis=1)   # (d, n-1)
    s_right = table[right_pos].sum(axis=1)
    n_left = np.arange(1, n, dtype=np.float64)
    n_right = n - n_left
    h_left = np.log2(n_left) - s_left / n_left
    h_right = np.log2(n_right) - s_right / n_right
    gains = parent_h - (n_left / n) * h_left - (n_right / n) * h_right

    valid = ((sorted_vals[1:] > sorted_vals[:-1]).T
             & (n_left >= min_leaf) & (n_right >= min_leaf))
    gains = np.where(valid, gains, -np.inf)

    best_gain = gains.max(initial=-np.inf)
    if not best_gain > 0.0:
        return None
    cols, rows = np.nonzero(gains == best_gain)  # (feature, position) pairs
    j = int(cols.min())
    pos = int(rows[cols == j].min())
    low, high = float(sorted_vals[pos, j]), float(sorted_vals[pos + 1, j])
    threshold = (low + high) / 2.0
    if threshold >= high:
        # adjacent floats: the midpoint rounded up, which would route both
        # sides left; the lower value keeps the <= split separating
        threshold = low
    return j, threshold, float(best_gain)


def best_split(x: np.ndarray, y, params: TreeParams = TreeParams()
               ) -> tuple[int, float, float] | None:
    """The (feature_index, threshold, gain) maximising information gain.

    Returns None when no admissible split has positive gain.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise InconsistentDimensions("feature matrix must be 2-D")
    labels = sorted(set(y))
    label_index = {lab: i for i, lab in enumerate(labels)}
    y_idx = np.array([label_index[lab] for lab in y], dtype=np.int64)
    return _best_split_indexed(x, y_idx, len(labels), params)


@dataclass(frozen=True)
class DecisionTree:
    """A fitted tree: the root node plus the training-time metadata needed
    to map leaves back to gesture confidences."""

    root: Leaf | Internal
    classes: tuple[str, ...]
    n_features: int
    params: TreeParams

    def predict(self, features) -> Prediction:
        """Route one flat vector to a leaf and report its class proportions."""
        vec = np.asarray(features, dtype=np.float64).ravel()
        if vec.shape[0] != self.n_features:
            raise DimensionMismatch(
                f"expected {self.n_features} features, got {vec.shape[0]}")
        node = self.root
        while isinstance(node, Internal):
            node = node.left if vec[node.feature_index] <= node.threshold else node.right
        total = sum(node.class_counts.values())
        per_gesture = {
            label: node.class_counts.get(label, 0) / total for label in self.classes
        }
        return Prediction(
            label=node.prediction,
            confidence=per_gesture[node.prediction],
            per_gesture=per_gesture,
        )

    def predict_label(self, features) -> str:
        return self.predict(features).label

    def predict_labels(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        return np.array([self.predict(row).label for row in x], dtype=object)

    def classify_per_gesture(self, features, saved_gestures) -> dict:
        """Confidence per requested gesture, consistent with predict().

        ``saved_gestures`` may hold gesture ids or objects with an ``id``.
        """
        ids = [getattr(g, "id", g) for g in saved_gestures]
        known = set(self.classes)
        for gesture_id in ids:
            if gesture_id not in known:
                raise UnknownGesture(f"{gesture_id!r} is not a trained class")
        per_gesture = self.predict(features).per_gesture
        return {gesture_id: per_gesture[gesture_id] for gesture_id in ids}

    def max_node_depth(self) -> int:
        def walk(node, depth):
            if isinstance(node, Leaf):
                return depth
            return max(walk(node.left, depth + 1), walk(node.right, depth + 1))
        return walk(self.root, 0)

    def to_dict(self) -> dict:
        def encode(node):
            if isinstance(node, Leaf):
                return {
                    "class_counts": {k: int(v) for k, v in sorted(node.class_counts.items())},
                    "prediction": node.prediction,
                    "depth": node.depth,
                }
            return {
                "feature_index": node.feature_index,
                "threshold": node.threshold,
                "left": encode(node.left),
                "right": encode(node.right),
            }
        return {
            "classes": list(self.classes),
            "n_features": self.n_features,
            "params": self.params.to_dict(),
            "root": encode(self.root),
        }

    @classmethod
    def from_dict(cls, raw: Mapping) -> "DecisionTree":
        def decode(node, depth):
            if "class_counts" in node:
                return Leaf(
                    class_counts={str(k): int(v) for k, v in node["class_counts"].items()},
                    prediction=str(node["prediction"]),
                    depth=int(node["depth"]),
                )
            return Internal(
                feature_index=int(node["feature_index"]),
                threshold=float(node["threshold"]),
                left=decode(node["left"], depth + 1),
                right=decode(node["right"], depth + 1),
            )
        try:
            return cls(
                root=decode(raw["root"], 0),
                classes=tuple(str(c) for c in raw["classes"]),
                n_features=int(raw["n_features"]),
                params=TreeParams.from_dict(raw.get("params", {})),
            )
        except (KeyError, TypeError) as exc:
            raise ValueError(f"invalid tree document: {exc}") from exc


def fit(x, y, params: TreeParams = TreeParams()) -> DecisionTree:
    """Grow a tree on (x, y); deterministic for identical input order.

    A node becomes a leaf when it is pure, when max_depth is reached, when it
    holds fewer than min_samples_split samples, or when no admissible split
    has positive gain.
    """
    try:
        x = np.asarray(x, dtype=np.float64)
    except ValueError as exc:
        raise InconsistentDimensions(
            "training vectors must all share one length") from exc
    if x.ndim == 1:
        x = x.reshape(-1, 1)
    if x.ndim != 2:
        raise InconsistentDimensions("training vectors must all share one length")
    y = list(y)
    if len(y) != x.shape[0] or len(y) == 0:
        raise InconsistentDimensions("need one label per training vector")

    classes = tuple(sorted(set(y)))
    label_index = {lab: i for i, lab in enumerate(classes)}
    y_idx = np.array([label_index[lab] for lab in y], dtype=np.int64)
    n_classes = len(classes)
    table = _mlog2m_table(len(y))

    def make_leaf(y_sub: np.ndarray, depth: int) -> Leaf:
        counts = np.bincount(y_sub, minlength=n_classes)
        # argmax returns the first maximum: classes are sorted, so ties break
        # to the lexicographically smallest label
        winner = classes[int(np.argmax(counts))]
        return Leaf(
            class_counts={classes[i]: int(c) for i, c in enumerate(counts) if c},
            prediction=winner,
            depth=depth,
        )

    def grow(x_sub: np.ndarray, y_sub: np.ndarray, depth: int):
        n = len(y_sub)
        pure = np.all(y_sub == y_sub[0])
        depth_capped = params.max_depth is not None and depth >= params.max_depth
        if pure or depth_capped or n < params.min_samples_split:
            return make_leaf(y_sub, depth)
        found = _best_split_indexed(x_sub, y_sub, n_classes, params, table)
        if found is None:
            return make_leaf(y_sub, depth)
        j, threshold, _gain = found
        mask = x_sub[:, j] <= threshold
        return Internal(
            feature_index=j,
            threshold=threshold,
            left=grow(x_sub[mask], y_sub[mask], depth + 1),
            right=grow(x_sub[~mask], y_sub[~mask], depth + 1),
        )

    return DecisionTree(
        root=grow(x, y_idx, 0),
        classes=classes,
        n_features=x.shape[1],
        params=params,
    )


def save_tree(tree: DecisionTree, path) -> None:
    Path(path).write_text(json.dumps(tree.to_dict(), indent=2, sort_keys=True) + "\n")


def load_tree(path) -> DecisionTree:
    return DecisionTree.from_dict(json.loads(Path(path).read_text()))
