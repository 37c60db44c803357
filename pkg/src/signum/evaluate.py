"""Evaluation protocol: stratified 70/30 split, 10-fold CV, grid search.

An experiment reports four headline numbers — mean train / mean test for
accuracy and macro-F1 — where the means are taken over the cross-validation
folds run with the chosen parameters.  Hyperparameters are selected by
10-fold CV inside the 70% training split; the held-out 30% gives a second,
single-shot set of metrics reported alongside (never conflated with the CV
means).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from signum.dtree import TreeParams, fit
from signum.errors import SignumError


class ClassTooSmall(SignumError):
    """A class has too few instances to split."""


class TooFewSamples(SignumError):
    """Dataset smaller than the number of folds."""


class EmptyConfusion(SignumError):
    """Metrics over zero samples are undefined."""


class MissingCategory(SignumError):
    """The experiment needs both alphabet and non-alphabet signs."""


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.70
    stratified: bool = True
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train_fraction must lie strictly between 0 and 1")


@dataclass(frozen=True)
class LabeledDataset:
    """A feature matrix with one string label per row."""

    features: np.ndarray
    labels: np.ndarray
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "features",
                           np.asarray(self.features, dtype=np.float64))
        object.__setattr__(self, "labels", np.asarray(self.labels, dtype=object))
        if self.features.ndim != 2 or len(self.labels) != len(self.features):
            raise ValueError("features must be 2-D with one label per row")

    def __len__(self) -> int:
        return len(self.labels)

    def subset(self, indices, name: str | None = None) -> "LabeledDataset":
        idx = np.asarray(indices, dtype=np.int64)
        return LabeledDataset(self.features[idx], self.labels[idx],
                              self.name if name is None else name)

    def class_indices(self) -> dict:
        """Sorted label -> sorted row indices, a deterministic grouping."""
        groups: dict = {}
        for i, label in enumerate(self.labels):
            groups.setdefault(label, []).append(i)
        return {label: np.array(groups[label]) for label in sorted(groups)}


def stratified_split(dataset: LabeledDataset, spec: SplitSpec
                     ) -> tuple[LabeledDataset, LabeledDataset]:
    """Disjoint, exhaustive train/test split, per-class share within one
    sample of the requested fraction."""
    rng = np.random.default_rng(spec.seed)
    train_idx: list[int] = []
    test_idx: list[int] = []
    for label, indices in dataset.class_indices().items():
        n = len(indices)
        if n < 2:
            raise ClassTooSmall(f"class {label!r} has {n} instance(s); need >= 2")
        order = rng.permutation(n) if spec.stratified else np.arange(n)
        n_train = int(np.floor(spec.train_fraction * n + 0.5))
        n_train = min(max(n_train, 1), n - 1)
        shuffled = indices[order]
        train_idx.extend(shuffled[:n_train])
        test_idx.extend(shuffled[n_train:])
    return (dataset.subset(sorted(train_idx), f"{dataset.name}/train"),
            dataset.subset(sorted(test_idx), f"{dataset.name}/test"))


def kfold(dataset: LabeledDataset, k: int = 10, seed: int = 0
          ) -> list[tuple[LabeledDataset, LabeledDataset]]:
    """Stratified k-fold partition: every sample lands in exactly one
    validation fold, per-class counts per fold differ by at most one, and
    total fold sizes differ by at most one."""
    n = len(dataset)
    if n < k:
        raise TooFewSamples(f"{n} samples cannot fill {k} folds")
    rng = np.random.default_rng(seed)
    fold_members: list[list[int]] = [[] for _ in range(k)]
    for label, indices in dataset.class_indices().items():
        shuffled = indices[rng.permutation(len(indices))]
        base, extra = divmod(len(shuffled), k)
        # the `extra` currently-smallest folds take one more of this class,
        # which keeps total fold sizes within one of each other
        order = sorted(range(k), key=lambda f: (len(fold_members[f]), f))
        take = {f: base + (1 if rank < extra else 0)
                for rank, f in enumerate(order)}
        cursor = 0
        for f in range(k):
            fold_members[f].extend(shuffled[cursor:cursor + take[f]])
            cursor += take[f]
    pairs = []
    for f in range(k):
        val = sorted(fold_members[f])
        val_set = set(val)
        train = [i for i in range(n) if i not in val_set]
        pairs.append((dataset.subset(train, f"{dataset.name}/fold{f}-train"),
                      dataset.subset(val, f"{dataset.name}/fold{f}-val")))
    return pairs


# ---------------------------------------------------------------------------
# metrics


def confusion_matrix(true_labels, predicted_labels) -> dict:
    counts: dict = {}
    for t, p in zip(true_labels, predicted_labels):
        counts[(t, p)] = counts.get((t, p), 0) + 1
    return counts


def accuracy(confusion: Mapping) -> float:
    total = sum(confusion.values())
    if total == 0:
        raise EmptyConfusion("no samples in confusion matrix")
    correct = sum(c for (t, p), c in confusion.items() if t == p)
    return correct / total


def macro_f1(confusion: Mapping) -> float:
    """Unweighted mean of per-class F1; a class with P+R = 0 scores 0."""
    if sum(confusion.values()) == 0:
        raise EmptyConfusion("no samples in confusion matrix")
    classes = sorted({t for t, _ in confusion} | {p for _, p in confusion})
    scores = []
    for cls in classes:
        tp = confusion.get((cls, cls), 0)
        fn = sum(c for (t, p), c in confusion.items() if t == cls and p != cls)
        fp = sum(c for (t, p), c in confusion.items() if p == cls and t != cls)
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        if precision + recall == 0.0:
            scores.append(0.0)
        else:
            scores.append(2 * precision * recall / (precision + recall))
    return float(np.mean(scores))


def _evaluate_params(pairs, params: TreeParams):
    """Per-fold train/validation metrics for one configuration."""
    fold_metrics = []
    pooled: dict = {}
    for i, (train, val) in enumerate(pairs):
        tree = fit(train.features, train.labels, params)
        train_conf = confusion_matrix(train.labels, tree.predict_labels(train.features))
        val_conf = confusion_matrix(val.labels, tree.predict_labels(val.features))
        for key, c in val_conf.items():
            pooled[key] = pooled.get(key, 0) + c
        fold_metrics.append({
            "fold": i,
            "train_accuracy": accuracy(train_conf),
            "train_f1": macro_f1(train_conf),
            "validation_accuracy": accuracy(val_conf),
            "validation_f1": macro_f1(val_conf),
        })
    return fold_metrics, pooled


@dataclass(frozen=True)
class EvaluationReport:
    """Everything one experiment produced, JSON-serialisable and seeded."""

    dataset_name: str
    seed: int
    n_samples: int
    n_classes: int
    chosen_params: TreeParams
    fold_metrics: tuple
    mean_train_accuracy: float
    mean_test_accuracy: float
    mean_train_f1: float
    mean_test_f1: float
    confusion_matrix: dict          # (true, predicted) -> count
    holdout_train_accuracy: float | None = None
    holdout_train_f1: float | None = None
    holdout_test_accuracy: float | None = None
    holdout_test_f1: float | None = None

    def confusion_accuracy(self) -> float:
        return accuracy(self.confusion_matrix)

    def to_dict(self) -> dict:
        nested: dict = {}
        for (t, p), c in sorted(self.confusion_matrix.items()):
            nested.setdefault(t, {})[p] = c
        out = {
            "dataset_name": self.dataset_name,
            "seed": self.seed,
            "n_samples": self.n_samples,
            "n_classes": self.n_classes,
            "chosen_params": self.chosen_params.to_dict(),
            "fold_metrics": list(self.fold_metrics),
            "mean_train_accuracy": self.mean_train_accuracy,
            "mean_test_accuracy": self.mean_test_accuracy,
            "mean_train_f1": self.mean_train_f1,
            "mean_test_f1": self.mean_test_f1,
            "confusion_matrix": nested,
        }
        if self.holdout_test_accuracy is not None:
            out["holdout"] = {
                "train_accuracy": self.holdout_train_accuracy,
                "train_f1": self.holdout_train_f1,
                "test_accuracy": self.holdout_test_accuracy,
                "test_f1": self.holdout_test_f1,
            }
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def default_param_grid() -> list[TreeParams]:
    grid = []
    for depth in (6, 9, 12, None):
        for split in (2, 4, 8):
            for leaf in (1, 2, 4):
                if leaf <= split:
                    grid.append(TreeParams(max_depth=depth,
                                           min_samples_split=split,
                                           min_samples_leaf=leaf))
    return grid


def _depth_rank(params: TreeParams) -> float:
    return float("inf") if params.max_depth is None else float(params.max_depth)


def grid_search(dataset: LabeledDataset,
                param_grid: Sequence[TreeParams] | None = None,
                k: int = 10, seed: int = 0) -> tuple[TreeParams, EvaluationReport]:
    """Pick the grid entry with the best mean k-fold validation accuracy.

    Ties prefer simpler trees: smaller max_depth, then larger
    min_samples_leaf, then larger min_samples_split.
    """
    grid = list(param_grid) if param_grid is not None else default_param_grid()
    if not grid:
        raise ValueError("empty parameter grid")
    pairs = kfold(dataset, k=k, seed=seed)

    best = None  # (score, tie_key, params, fold_metrics, pooled)
    for params in grid:
        fold_metrics, pooled = _evaluate_params(pairs, params)
        score = float(np.mean([m["validation_accuracy"] for m in fold_metrics]))
        tie_key = (_depth_rank(params), -params.min_samples_leaf,
                   -params.min_samples_split)
        if best is None or score > best[0] or (score == best[0] and tie_key < best[1]):
            best = (score, tie_key, params, fold_metrics, pooled)

    _score, _key, params, fold_metrics, pooled = best
    report = EvaluationReport(
        dataset_name=dataset.name,
        seed=seed,
        n_samples=len(dataset),
        n_classes=len(set(dataset.labels)),
        chosen_params=params,
        fold_metrics=tuple(fold_metrics),
        mean_train_accuracy=float(np.mean([m["train_accuracy"] for m in fold_metrics])),
        mean_test_accuracy=float(np.mean([m["validation_accuracy"] for m in fold_metrics])),
        mean_train_f1=float(np.mean([m["train_f1"] for m in fold_metrics])),
        mean_test_f1=float(np.mean([m["validation_f1"] for m in fold_metrics])),
        confusion_matrix=pooled,
    )
    return params, report


def evaluate_split(dataset: LabeledDataset, *, seed: int = 0, k: int = 10,
                   param_grid: Sequence[TreeParams] | None = None,
                   spec: SplitSpec | None = None) -> EvaluationReport:
    """Full protocol for one dataset: split, tune by CV, report CV means plus
    held-out metrics and the held-out confusion matrix."""
    spec = spec or SplitSpec(seed=seed)
    train, test = stratified_split(dataset, spec)
    params, cv_report = grid_search(train, param_grid, k=k, seed=seed)

    tree = fit(train.features, train.labels, params)
    train_conf = confusion_matrix(train.labels, tree.predict_labels(train.features))
    test_conf = confusion_matrix(test.labels, tree.predict_labels(test.features))
    return EvaluationReport(
        dataset_name=dataset.name,
        seed=seed,
        n_samples=len(dataset),
        n_classes=len(set(dataset.labels)),
        chosen_params=params,
        fold_metrics=cv_report.fold_metrics,
        mean_train_accuracy=cv_report.mean_train_accuracy,
        mean_test_accuracy=cv_report.mean_test_accuracy,
        mean_train_f1=cv_report.mean_train_f1,
        mean_test_f1=cv_report.mean_test_f1,
        confusion_matrix=test_conf,
        holdout_train_accuracy=accuracy(train_conf),
        holdout_train_f1=macro_f1(train_conf),
        holdout_test_accuracy=accuracy(test_conf),
        holdout_test_f1=macro_f1(test_conf),
    )


def run_headline_experiments(database, instances, *, seed: int = 7, k: int = 10,
                          param_grid: Sequence[TreeParams] | None = None
                          ) -> tuple[EvaluationReport, EvaluationReport]:
    """The two headline experiments: alphabet-only and all signs.

    ``instances`` are labelled gesture instances (synthdata.SignInstance).
    Alphabet vectors stay at their natural 22 dimensions; the mixed-arity
    all-signs matrix is padded to the 3-pose length.
    """
    from signum.features import build_feature_matrix
    from signum.handmodel import Category

    alpha = [it for it in instances if it.gesture.category is Category.ALPHABET]
    rest = [it for it in instances if it.gesture.category is not Category.ALPHABET]
    if not alpha or not rest:
        raise MissingCategory("need both alphabet and non-alphabet instances")

    xa, ya = build_feature_matrix(alpha)
    alphabet_ds = LabeledDataset(xa, ya, name="alphabet")
    xall, yall = build_feature_matrix(list(instances), pad_arity=3)
    all_ds = LabeledDataset(xall, yall, name="all-signs")

    alpha_report = evaluate_split(alphabet_ds, seed=seed, k=k, param_grid=param_grid)
    all_report = evaluate_split(all_ds, seed=seed, k=k, param_grid=param_grid)
    return alpha_report, all_report


def format_results_table(alphabet: EvaluationReport,
                         all_signs: EvaluationReport) -> str:
    """Aligned text table in the four-column layout: dataset, metric,
    mean train, mean test."""
    rows = [
        ("Alphabet", "Accuracy", alphabet.mean_train_accuracy, alphabet.mean_test_accuracy),
        ("Alphabet", "F1-Score", alphabet.mean_train_f1, alphabet.mean_test_f1),
        ("All Signs", "Accuracy", all_signs.mean_train_accuracy, all_signs.mean_test_accuracy),
        ("All Signs", "F1-Score", all_signs.mean_train_f1, all_signs.mean_test_f1),
    ]
    lines = [
        f"{'Dataset':<10} {'Metric':<9} {'Mean Train':>11} {'Mean Test':>10}",
        "-" * 43,
    ]
    for dataset, metric, train, test in rows:
        lines.append(f"{dataset:<10} {metric:<9} {train:>11.3f} {test:>10.3f}")
    return "\n".join(lines) + "\n"


def fold_metrics_csv(report: EvaluationReport) -> str:
    header = "fold,train_accuracy,train_f1,validation_accuracy,validation_f1"
    lines = [header]
    for m in report.fold_metrics:
        lines.append(
            f"{m['fold']},{m['train_accuracy']!r},{m['train_f1']!r},"
            f"{m['validation_accuracy']!r},{m['validation_f1']!r}")
    return "\n".join(lines) + "\n"
