"""Shared helpers for the classical classifiers."""
from __future__ import annotations

import numpy as np

from ..features import FeatureMatrix, SparseVector

MODEL_FORMAT_VERSION = 1


class ClassifierError(ValueError):
    pass


class DivergenceError(ClassifierError, ArithmeticError):
    """Training produced a non-finite loss."""


def check_binary(data: FeatureMatrix):
    y = data.y()
    present = set(np.unique(y).tolist())
    if present != {0, 1}:
        raise ClassifierError(f"training data must contain both classes, got {sorted(present)}")
    return y


def as_dense(x, size):
    """Dense float64 copy of a SparseVector (or pass-through for arrays)."""
    if isinstance(x, SparseVector):
        return x.to_dense(size)
    return np.asarray(x, dtype=np.float64)


class LinearScoreMixin:
    """predict / batch helpers for models exposing ``predict_score``."""

    threshold = 0.5

    def predict(self, x) -> int:
        return int(self.predict_score(x) >= self.threshold)

    def predict_scores(self, rows) -> np.ndarray:
        return np.array([self.predict_score(x) for x in rows], dtype=np.float64)

    def predict_many(self, rows) -> np.ndarray:
        return np.array([self.predict(x) for x in rows], dtype=np.int64)
