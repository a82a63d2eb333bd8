"""Multinomial Naive Bayes with Laplace smoothing."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..features import FeatureMatrix, SparseVector
from .base import ClassifierError, LinearScoreMixin, check_binary


@dataclass(frozen=True, eq=False)
class NBModel(LinearScoreMixin):
    log_prior: np.ndarray       # (2,)
    log_likelihood: np.ndarray  # (2, V)
    alpha: float

    model_type = "nb"

    def log_posteriors(self, x: SparseVector) -> np.ndarray:
        """Unnormalized log P(y) + sum_w c_w log P(w|y) for y in {0, 1}."""
        out = self.log_prior.copy()
        if len(x):
            idx = np.asarray(x.indices)
            c = np.asarray(x.counts, dtype=np.float64)
            out += self.log_likelihood[:, idx] @ c
        return out

    def predict_score(self, x: SparseVector) -> float:
        l0, l1 = self.log_posteriors(x)
        # softmax over two entries, written to avoid overflow either way
        d = l0 - l1
        if d >= 0:
            e = np.exp(-d)
            return float(e / (1.0 + e))
        return float(1.0 / (1.0 + np.exp(d)))

    def predict_proba(self, x: SparseVector) -> np.ndarray:
        p1 = self.predict_score(x)
        return np.array([1.0 - p1, p1])

    def to_params(self) -> dict:
        return {
            "alpha": self.alpha,
            "log_prior": self.log_prior.tolist(),
            "log_likelihood": self.log_likelihood.tolist(),
        }

    @classmethod
    def from_params(cls, p):
        return cls(np.asarray(p["log_prior"], dtype=np.float64),
                   np.asarray(p["log_likelihood"], dtype=np.float64), float(p["alpha"]))


def nb_fit(data: FeatureMatrix, alpha: float = 1.0) -> NBModel:
    if not alpha > 0:
        raise ClassifierError("alpha must be > 0")
    y = check_binary(data)
    X = data.dense()
    V = X.shape[1]
    n = len(y)
    log_prior = np.empty(2)
    log_lik = np.empty((2, V))
    for c in (0, 1):
        counts = X[y == c].sum(axis=0)
        log_prior[c] = np.log(np.count_nonzero(y == c) / n)
        log_lik[c] = np.log((counts + alpha) / (counts.sum() + alpha * V))
    return NBModel(log_prior, log_lik, float(alpha))
