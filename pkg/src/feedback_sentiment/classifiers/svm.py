"""Linear SVM trained with Pegasos-style primal subgradient steps."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import _rng
from ..features import FeatureMatrix
from .base import ClassifierError, LinearScoreMixin, as_dense, check_binary


@dataclass(frozen=True)
class SVMConfig:
    lam: float = 1e-4
    epochs: int = 100
    seed: int = 0
    project: bool = True


@dataclass(frozen=True, eq=False)
class SVMModel(LinearScoreMixin):
    weights: np.ndarray
    bias: float
    config: SVMConfig

    model_type = "svm"
    threshold = 0.0

    def predict_score(self, x) -> float:
        """Signed margin w.x + b (not a probability)."""
        return float(as_dense(x, self.weights.size) @ self.weights + self.bias)

    def to_params(self) -> dict:
        c = self.config
        return {"weights": self.weights.tolist(), "bias": self.bias,
                "lam": c.lam, "epochs": c.epochs, "seed": c.seed, "project": c.project}

    @classmethod
    def from_params(cls, p):
        cfg = SVMConfig(p["lam"], p["epochs"], p["seed"], p["project"])
        return cls(np.asarray(p["weights"], dtype=np.float64), float(p["bias"]), cfg)


def svm_objective(w, b, X, y_pm, lam):
    """(lam/2)(|w|^2 + b^2) + mean hinge loss, labels in {-1, +1}."""
    margins = y_pm * (X @ w + b)
    return 0.5 * lam * (w @ w + b * b) + np.mean(np.maximum(0.0, 1.0 - margins))


def svm_fit(data: FeatureMatrix, config: SVMConfig = SVMConfig()) -> SVMModel:
    """Pegasos: at step t use eta = 1/(lam t) on one example.

    The bias is carried as an extra constant-1 feature, so it is regularized
    together with the weights.
    """
    if not config.lam > 0:
        raise ClassifierError("lam must be > 0")
    y = check_binary(data)
    y_pm = np.where(y == 1, 1.0, -1.0)
    X = np.hstack([data.dense(), np.ones((len(y), 1))])
    w = np.zeros(X.shape[1])
    rng = _rng.substream(config.seed, "svm")
    radius = 1.0 / np.sqrt(config.lam)
    t = 0
    for _ in range(config.epochs):
        for i in rng.permutation(len(y)):
            t += 1
            eta = 1.0 / (config.lam * t)
            violated = y_pm[i] * (X[i] @ w) < 1.0
            w *= 1.0 - eta * config.lam
            if violated:
                w += eta * y_pm[i] * X[i]
            if config.project:
                norm = np.sqrt(w @ w)
                if norm > radius:
                    w *= radius / norm
    return SVMModel(w[:-1].copy(), float(w[-1]), config)
