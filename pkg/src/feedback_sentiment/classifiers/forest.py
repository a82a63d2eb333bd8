"""Random forest of Gini-split decision trees over count features."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .. import _rng
from ..features import FeatureMatrix
from .base import LinearScoreMixin, as_dense, check_binary

LEAF = -1


@dataclass(frozen=True)
class RFConfig:
    n_trees: int = 100
    max_depth: int | None = 16
    features_per_split: int | None = None  # None -> ceil(sqrt(V))
    bootstrap: bool = True
    seed: int = 0
    n_jobs: int = 1


@dataclass(frozen=True, eq=False)
class DecisionTree:
    """Flat preorder node arrays. Internal nodes route ``x[f] >= t`` right."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    label: np.ndarray

    @property
    def n_nodes(self):
        return len(self.feature)

    def leaf_of(self, x) -> int:
        node = 0
        while self.feature[node] != LEAF:
            if x[self.feature[node]] >= self.threshold[node]:
                node = self.right[node]
            else:
                node = self.left[node]
        return node

    def predict(self, x) -> int:
        return int(self.label[self.leaf_of(x)])

    def to_params(self):
        return {k: getattr(self, k).tolist() for k in ("feature", "threshold", "left", "right", "label")}

    @classmethod
    def from_params(cls, p):
        return cls(np.asarray(p["feature"], dtype=np.int64),
                   np.asarray(p["threshold"], dtype=np.float64),
                   np.asarray(p["left"], dtype=np.int64),
                   np.asarray(p["right"], dtype=np.int64),
                   np.asarray(p["label"], dtype=np.int64))


def _gini(n1, n):
    p = n1 / n
    return 1.0 - p * p - (1.0 - p) * (1.0 - p)


def _best_split_on_feature(v, y):
    """Lowest weighted child Gini for thresholds on one column.

    Returns (impurity, threshold) or None if the column is constant.
    """
    order = np.argsort(v, kind="stable")
    vs, ys = v[order], y[order]
    boundaries = np.flatnonzero(vs[1:] != vs[:-1])
    if boundaries.size == 0:
        return None
    n = len(vs)
    cum1 = np.cumsum(ys)
    n_left = boundaries + 1
    left1 = cum1[boundaries]
    right1 = cum1[-1] - left1
    n_right = n - n_left
    pl = left1 / n_left
    pr = right1 / n_right
    g = (n_left * (1 - pl * pl - (1 - pl) ** 2) + n_right * (1 - pr * pr - (1 - pr) ** 2)) / n
    j = int(np.argmin(g))
    return float(g[j]), float(vs[boundaries[j] + 1])


def _majority(y):
    ones = int(y.sum())
    return int(ones > len(y) - ones)


def fit_tree(X, y, max_depth, features_per_split, rng) -> DecisionTree:
    """Grow one tree on rows of ``X`` (duplicates allowed, e.g. a bootstrap)."""
    V = X.shape[1]
    feature, threshold, left, right, label = [], [], [], [], []

    def new_node():
        feature.append(LEAF)
        threshold.append(0.0)
        left.append(LEAF)
        right.append(LEAF)
        label.append(0)
        return len(feature) - 1

    def grow(rows, depth):
        node = new_node()
        ys = y[rows]
        label[node] = _majority(ys)
        n1 = int(ys.sum())
        if n1 == 0 or n1 == len(ys) or len(ys) < 2:
            return node
        if max_depth is not None and depth >= max_depth:
            return node
        Xn = X[rows]
        varies = Xn.max(axis=0) != Xn.min(axis=0)
        if not varies.any():
            return node
        best = None
        inspected = 0
        # walk a random feature order; look at >= features_per_split columns and
        # keep going until at least one usable split has been seen
        for f in rng.permutation(V):
            inspected += 1
            if varies[f]:
                found = _best_split_on_feature(Xn[:, f], ys)
                if found is not None and (best is None or found[0] < best[0]):
                    best = (found[0], found[1], int(f))
            if inspected >= features_per_split and best is not None:
                break
        _, t, f = best
        go_right = Xn[:, f] >= t
        feature[node] = f
        threshold[node] = t
        left[node] = grow(rows[~go_right], depth + 1)
        right[node] = grow(rows[go_right], depth + 1)
        return node

    grow(np.arange(X.shape[0]), 0)
    return DecisionTree(np.asarray(feature, dtype=np.int64), np.asarray(threshold),
                        np.asarray(left, dtype=np.int64), np.asarray(right, dtype=np.int64),
                        np.asarray(label, dtype=np.int64))


@dataclass(frozen=True, eq=False)
class RFModel(LinearScoreMixin):
    trees: tuple
    config: RFConfig
    n_features: int

    model_type = "rf"

    def votes(self, x) -> np.ndarray:
        x = as_dense(x, self.n_features)
        return np.array([t.predict(x) for t in self.trees], dtype=np.int64)

    def predict_score(self, x) -> float:
        """Fraction of trees voting 1."""
        return float(np.mean(self.votes(x)))

    def predict(self, x) -> int:
        v = self.votes(x)
        return int(2 * int(v.sum()) > len(v))

    def to_params(self) -> dict:
        c = self.config
        return {"n_trees": c.n_trees, "max_depth": c.max_depth,
                "features_per_split": c.features_per_split, "bootstrap": c.bootstrap,
                "seed": c.seed, "n_features": self.n_features,
                "trees": [t.to_params() for t in self.trees]}

    @classmethod
    def from_params(cls, p):
        cfg = RFConfig(p["n_trees"], p["max_depth"], p["features_per_split"], p["bootstrap"], p["seed"])
        return cls(tuple(DecisionTree.from_params(t) for t in p["trees"]), cfg, int(p["n_features"]))


def rf_fit(data: FeatureMatrix, config: RFConfig = RFConfig()) -> RFModel:
    """Each tree draws its bootstrap and feature orders from its own
    ``(seed, tree_index)`` stream, so results do not depend on ``n_jobs``."""
    y = check_binary(data)
    X = data.dense()
    n, V = X.shape
    m = config.features_per_split or math.ceil(math.sqrt(V))
    m = max(1, min(m, V))

    def one(i):
        rng = _rng.substream(config.seed, "rf", i)
        rows = rng.integers(0, n, size=n) if config.bootstrap else np.arange(n)
        return fit_tree(X[rows], y[rows], config.max_depth, m, rng)

    if config.n_jobs > 1:
        with ThreadPoolExecutor(max_workers=config.n_jobs) as pool:
            trees = list(pool.map(one, range(config.n_trees)))
    else:
        trees = [one(i) for i in range(config.n_trees)]
    return RFModel(tuple(trees), config, V)


def rf_predict(model: RFModel, x) -> int:
    return model.predict(x)
