"""Random forest on numpy arrays, deterministic for a fixed master seed.

Trees are fully grown (no depth cap, leaves down to one sample), each on
a bootstrap sample, with a fresh random feature subset drawn at every
split: ceil(sqrt(F)) features for classification, ceil(F/3) for
regression. Classification predicts the majority vote over trees (ties
go to the positive class), regression the mean of tree outputs.
Per-tree seeds are spawned from the master seed, so retraining on the
same data reproduces the model bit for bit.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

MODEL_FORMAT_VERSION = 1
DEFAULT_TREES = 100


@dataclass
class _Tree:
    """Array-encoded binary tree; feature -1 marks a leaf."""

    feature: list[int]
    threshold: list[float]
    left: list[int]
    right: list[int]
    value: list[float]

    def predict_one(self, x: np.ndarray) -> float:
        node = 0
        while self.feature[node] >= 0:
            if x[self.feature[node]] <= self.threshold[node]:
                node = self.left[node]
            else:
                node = self.right[node]
        return self.value[node]


def _leaf_value(y: np.ndarray, classification: bool) -> float:
    if classification:
        ones = float(np.count_nonzero(y))
        return 1.0 if 2.0 * ones >= len(y) else 0.0
    return float(y.mean())


def _best_split(X: np.ndarray, y: np.ndarray, idx: np.ndarray,
                feature_ids: np.ndarray, classification: bool,
                ) -> Optional[tuple[int, float]]:
    """Lowest-impurity (feature, threshold) among the sampled features."""
    n = len(idx)
    best_cost = math.inf
    best: Optional[tuple[int, float]] = None
    for f in feature_ids:
        xa = X[idx, f]
        order = np.argsort(xa, kind="stable")
        xs = xa[order]
        splittable = xs[:-1] != xs[1:]
        if not splittable.any():
            continue
        ys = y[idx][order]
        nl = np.arange(1, n, dtype=float)
        nr = n - nl
        if classification:
            ones_l = np.cumsum(ys)[:-1]
            ones_r = ones_l[-1] + ys[-1] - ones_l
            gini_l = 1.0 - (ones_l / nl) ** 2 - ((nl - ones_l) / nl) ** 2
            gini_r = 1.0 - (ones_r / nr) ** 2 - ((nr - ones_r) / nr) ** 2
            cost = nl * gini_l + nr * gini_r
        else:
            s_l = np.cumsum(ys)[:-1]
            q_l = np.cumsum(ys * ys)[:-1]
            s_r = s_l[-1] + ys[-1] - s_l
            q_r = q_l[-1] + ys[-1] ** 2 - q_l
            cost = (q_l - s_l ** 2 / nl) + (q_r - s_r ** 2 / nr)
        cost = np.where(splittable, cost, math.inf)
        pos = int(np.argmin(cost))
        if cost[pos] < best_cost:
            threshold = (xs[pos] + xs[pos + 1]) / 2.0
            if threshold >= xs[pos + 1]:  # midpoint rounded up to the next value
                threshold = float(xs[pos])
            best_cost = float(cost[pos])
            best = (int(f), float(threshold))
    return best


def _grow_tree(X: np.ndarray, y: np.ndarray, m: int, classification: bool,
               rng: np.random.Generator) -> _Tree:
    n_features = X.shape[1]
    tree = _Tree(feature=[-1], threshold=[0.0], left=[-1], right=[-1], value=[0.0])
    stack: list[tuple[np.ndarray, int]] = [(np.arange(len(y)), 0)]
    while stack:
        idx, node = stack.pop()
        y_node = y[idx]
        if len(idx) < 2 or (y_node == y_node[0]).all():
            tree.value[node] = _leaf_value(y_node, classification)
            continue
        feature_ids = rng.choice(n_features, size=m, replace=False)
        split = _best_split(X, y, idx, feature_ids, classification)
        if split is None:
            tree.value[node] = _leaf_value(y_node, classification)
            continue
        f, threshold = split
        mask = X[idx, f] <= threshold
        for child_mask in (mask, ~mask):
            tree.feature.append(-1)
            tree.threshold.append(0.0)
            tree.left.append(-1)
            tree.right.append(-1)
            tree.value.append(0.0)
            child = len(tree.feature) - 1
            stack.append((idx[child_mask], child))
            if child_mask is mask:
                tree.left[node] = child
            else:
                tree.right[node] = child
        tree.feature[node] = f
        tree.threshold[node] = threshold
    return tree


@dataclass
class ForestModel:
    """Trained ensemble plus the schema needed to apply it safely."""

    kind: str  # "classification" | "regression"
    feature_names: tuple[str, ...]
    seed: int
    n_trees: int
    trees: list[_Tree]
    degenerate: bool = False  # single-label training set (classification)

    def _check(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != len(self.feature_names):
            raise ValueError(
                f"feature vector has {X.shape[1]} values, model expects "
                f"{len(self.feature_names)}")
        return X

    def predict(self, X) -> np.ndarray:
        """Majority label (classification) or mean output (regression)."""
        X = self._check(X)
        votes = np.array([[t.predict_one(x) for x in X] for t in self.trees])
        if self.kind == "classification":
            return (votes.mean(axis=0) >= 0.5).astype(float)
        return votes.mean(axis=0)

    def to_dict(self) -> dict:
        return {
            "format_version": MODEL_FORMAT_VERSION,
            "kind": self.kind,
            "feature_names": list(self.feature_names),
            "seed": self.seed,
            "n_trees": self.n_trees,
            "degenerate": self.degenerate,
            "trees": [{"feature": t.feature, "threshold": t.threshold,
                       "left": t.left, "right": t.right, "value": t.value}
                      for t in self.trees],
        }

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, data: dict) -> "ForestModel":
        version = data.get("format_version")
        if version != MODEL_FORMAT_VERSION:
            raise ValueError(f"unsupported model format version: {version!r}")
        trees = [_Tree(**t) for t in data["trees"]]
        return cls(kind=data["kind"], feature_names=tuple(data["feature_names"]),
                   seed=data["seed"], n_trees=data["n_trees"], trees=trees,
                   degenerate=data["degenerate"])

    @classmethod
    def load(cls, path) -> "ForestModel":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def fit_forest(X, y, kind: str, seed: int, n_trees: int = DEFAULT_TREES,
               feature_names: Optional[Sequence[str]] = None) -> ForestModel:
    """Train an ensemble; deterministic for fixed (seed, data)."""
    if kind not in ("classification", "regression"):
        raise ValueError(f"unknown model kind: {kind!r}")
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float)
    if X.shape[0] == 0:
        raise ValueError("cannot train on an empty row set")
    if X.shape[0] != len(y):
        raise ValueError(f"feature/target length mismatch: {X.shape[0]} vs {len(y)}")
    n, n_features = X.shape
    if feature_names is None:
        feature_names = tuple(f"f{i}" for i in range(n_features))
    feature_names = tuple(feature_names)
    if len(feature_names) != n_features:
        raise ValueError("feature_names length does not match the data")

    classification = kind == "classification"
    if classification:
        m = math.ceil(math.sqrt(n_features))
    else:
        m = math.ceil(n_features / 3)
    m = min(m, n_features)

    degenerate = classification and len(np.unique(y)) < 2
    trees = []
    for child_seed in np.random.SeedSequence(seed).spawn(n_trees):
        rng = np.random.default_rng(child_seed)
        boot = rng.integers(0, n, size=n)
        trees.append(_grow_tree(X[boot], y[boot], m, classification, rng))
    return ForestModel(kind=kind, feature_names=feature_names, seed=seed,
                       n_trees=n_trees, trees=trees, degenerate=degenerate)
