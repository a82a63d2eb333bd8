"""k-nearest-neighbour classifier over BoW count vectors."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..features import FeatureMatrix
from .base import ClassifierError, LinearScoreMixin, as_dense, check_binary

METRICS = ("cosine", "euclidean")


def distances(X, x, metric):
    """Distance from every row of ``X`` to ``x``.

    Cosine distance is 1 - x.y / (|x| |y|), taken as 1 when either vector is
    zero. For integer counts the dot products and squared norms are exact, so
    results are reproducible bit-for-bit.
    """
    if metric == "cosine":
        dots = X @ x
        norms = np.sqrt(np.sum(X * X, axis=1))
        nx = np.sqrt(np.sum(x * x))
        denom = norms * nx
        out = np.ones(X.shape[0])
        nz = denom > 0
        out[nz] = 1.0 - dots[nz] / denom[nz]
        return out
    if metric == "euclidean":
        diff = X - x
        return np.sqrt(np.sum(diff * diff, axis=1))
    raise ClassifierError(f"unknown metric {metric!r}; expected one of {METRICS}")


@dataclass(frozen=True, eq=False)
class KNNModel(LinearScoreMixin):
    X: np.ndarray
    y: np.ndarray
    k: int = 5
    metric: str = "cosine"

    model_type = "knn"

    def __post_init__(self):
        if not 1 <= self.k <= len(self.y):
            raise ClassifierError(f"k must lie in [1, {len(self.y)}], got {self.k}")
        if self.metric not in METRICS:
            raise ClassifierError(f"unknown metric {self.metric!r}")

    def neighbors(self, x):
        """Indices of the k nearest stored rows; equal distances favour lower index."""
        d = distances(self.X, as_dense(x, self.X.shape[1]), self.metric)
        order = np.argsort(d, kind="stable")[: self.k]
        return order, d[order]

    def predict_score(self, x) -> float:
        """Fraction of the k neighbours labelled 1."""
        idx, _ = self.neighbors(x)
        return float(np.mean(self.y[idx]))

    def predict(self, x) -> int:
        idx, d = self.neighbors(x)
        labels = self.y[idx]
        ones = int(labels.sum())
        zeros = self.k - ones
        if ones != zeros:
            return int(ones > zeros)
        # vote tie: smaller summed distance wins, then label 0
        s1 = float(d[labels == 1].sum())
        s0 = float(d[labels == 0].sum())
        return int(s1 < s0)

    def to_params(self) -> dict:
        rows = []
        for r in self.X:
            nz = np.flatnonzero(r)
            rows.append([nz.tolist(), r[nz].tolist()])
        return {"k": self.k, "metric": self.metric, "n_features": self.X.shape[1],
                "rows": rows, "labels": self.y.tolist()}

    @classmethod
    def from_params(cls, p):
        X = np.zeros((len(p["rows"]), p["n_features"]))
        for i, (idx, vals) in enumerate(p["rows"]):
            X[i, idx] = vals
        return cls(X, np.asarray(p["labels"], dtype=np.int64), int(p["k"]), p["metric"])


def knn_fit(data: FeatureMatrix, k: int = 5, metric: str = "cosine") -> KNNModel:
    y = check_binary(data)
    return KNNModel(data.dense(), y, k, metric)


def knn_predict(model: KNNModel, x) -> int:
    return model.predict(x)
