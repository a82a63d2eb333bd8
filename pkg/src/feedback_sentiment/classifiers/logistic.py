"""L2-regularized logistic regression trained by full-batch gradient descent."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from ..features import FeatureMatrix
from .base import DivergenceError, LinearScoreMixin, as_dense, check_binary


@dataclass(frozen=True)
class LRConfig:
    lr: float = 0.1
    l2: float = 1e-4
    epochs: int = 300
    seed: int = 0  # unused by full-batch GD from zero init; kept for config symmetry


@dataclass(frozen=True, eq=False)
class LRModel(LinearScoreMixin):
    weights: np.ndarray
    bias: float
    config: LRConfig
    loss_history: tuple = ()

    model_type = "lr"

    def decision(self, x) -> float:
        return float(as_dense(x, self.weights.size) @ self.weights + self.bias)

    def predict_score(self, x) -> float:
        return float(expit(self.decision(x)))

    def predict_proba(self, x) -> np.ndarray:
        p1 = self.predict_score(x)
        return np.array([1.0 - p1, p1])

    def to_params(self) -> dict:
        c = self.config
        return {
            "weights": self.weights.tolist(),
            "bias": self.bias,
            "lr": c.lr, "l2": c.l2, "epochs": c.epochs, "seed": c.seed,
            "loss_history": list(self.loss_history),
        }

    @classmethod
    def from_params(cls, p):
        cfg = LRConfig(p["lr"], p["l2"], p["epochs"], p["seed"])
        return cls(np.asarray(p["weights"], dtype=np.float64), float(p["bias"]), cfg,
                   tuple(p.get("loss_history", ())))


def lr_loss_and_grad(w, b, X, y, l2):
    """Mean log loss plus (l2/2)*||w||^2; bias is not penalized."""
    z = X @ w + b
    loss = np.mean(np.logaddexp(0.0, z) - y * z) + 0.5 * l2 * (w @ w)
    r = expit(z) - y
    gw = X.T @ r / len(y) + l2 * w
    gb = float(np.mean(r))
    return float(loss), gw, gb


def lr_fit(data: FeatureMatrix, config: LRConfig = LRConfig()) -> LRModel:
    """Run ``config.epochs`` full-batch gradient steps from zero weights.

    ``loss_history[e]`` is the objective after step ``e``.
    """
    y = check_binary(data).astype(np.float64)
    X = data.dense()
    w = np.zeros(X.shape[1])
    b = 0.0
    history = []
    for epoch in range(config.epochs):
        with np.errstate(over="ignore", invalid="ignore"):  # divergence is reported below
            _, gw, gb = lr_loss_and_grad(w, b, X, y, config.l2)
            w = w - config.lr * gw
            b = b - config.lr * gb
            loss = lr_loss_and_grad(w, b, X, y, config.l2)[0]
        if not np.isfinite(loss) or not np.all(np.isfinite(w)):
            raise DivergenceError(
                f"logistic regression diverged at epoch {epoch + 1} (loss={loss}); lower the learning rate"
            )
        history.append(loss)
    return LRModel(w, float(b), config, tuple(history))
