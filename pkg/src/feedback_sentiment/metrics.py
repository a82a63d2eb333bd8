"""Confusion matrices, per-class precision/recall/F1, ROC/AUC and comparison tables."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal

import numpy as np

LABELS = (0, 1)


class MetricsError(ValueError):
    pass


def round_half_up(x: float, ndigits: int = 2) -> float:
    """Decimal-style rounding (0.805 -> 0.81), unlike banker's ``round``."""
    q = Decimal(1).scaleb(-ndigits)
    return float(Decimal(repr(float(x))).quantize(q, rounding=ROUND_HALF_UP))


def _ratio(num, den):
    """num/den, with 0/0 defined as 0; second value flags the undefined case."""
    if den == 0:
        return 0.0, True
    return num / den, False


def f1_score(precision: float, recall: float) -> float:
    """Harmonic mean 2PR/(P+R); 0 when P + R = 0."""
    if precision + recall == 0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


@dataclass(frozen=True, eq=False)
class ConfusionMatrix:
    """``counts[t, p]`` = examples with true label t predicted as p."""

    counts: np.ndarray

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def __eq__(self, other):
        return isinstance(other, ConfusionMatrix) and np.array_equal(self.counts, other.counts)

    def scaled(self, factor: int) -> "ConfusionMatrix":
        return ConfusionMatrix(self.counts * int(factor))


def confusion(y_true, y_pred) -> ConfusionMatrix:
    y_true = np.asarray(y_true, dtype=np.int64).ravel()
    y_pred = np.asarray(y_pred, dtype=np.int64).ravel()
    if y_true.shape != y_pred.shape:
        raise MetricsError(f"length mismatch: {y_true.size} true vs {y_pred.size} predicted")
    if y_true.size == 0:
        raise MetricsError("need at least one example")
    for name, arr in (("y_true", y_true), ("y_pred", y_pred)):
        if not np.isin(arr, LABELS).all():
            raise MetricsError(f"{name} must contain only 0/1")
    counts = np.zeros((2, 2), dtype=np.int64)
    np.add.at(counts, (y_true, y_pred), 1)
    return ConfusionMatrix(counts)


@dataclass(frozen=True)
class ClassMetrics:
    label: int
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class MetricsReport:
    per_class: tuple
    accuracy: float
    macro_precision: float
    macro_recall: float
    macro_f1: float
    undefined: tuple = ()  # e.g. ("precision_1",) when nothing was predicted as 1

    def for_label(self, label) -> ClassMetrics:
        return self.per_class[label]


def report(cm: ConfusionMatrix) -> MetricsReport:
    n = cm.counts
    if cm.total < 1:
        raise MetricsError("empty confusion matrix")
    per_class, undefined = [], []
    for c in LABELS:
        p, p_undef = _ratio(n[c, c], n[:, c].sum())
        r, r_undef = _ratio(n[c, c], n[c, :].sum())
        if p_undef:
            undefined.append(f"precision_{c}")
        if r_undef:
            undefined.append(f"recall_{c}")
        per_class.append(ClassMetrics(c, float(p), float(r), float(f1_score(p, r)), int(n[c, :].sum())))
    acc = float(np.trace(n) / cm.total)
    return MetricsReport(
        tuple(per_class), acc,
        float(np.mean([m.precision for m in per_class])),
        float(np.mean([m.recall for m in per_class])),
        float(np.mean([m.f1 for m in per_class])),
        tuple(undefined),
    )


@dataclass(frozen=True, eq=False)
class RocCurve:
    fpr: np.ndarray
    tpr: np.ndarray
    thresholds: np.ndarray  # thresholds[0] = +inf, the (0, 0) corner
    auc: float


def roc_auc(y_true, scores) -> RocCurve:
    """ROC by sweeping distinct scores in descending order; trapezoidal AUC.

    Tied scores move the curve in a single diagonal step, which is what makes
    the area equal the pair-counting statistic with ties worth one half.
    """
    y = np.asarray(y_true, dtype=np.int64).ravel()
    s = np.asarray(scores, dtype=np.float64).ravel()
    if y.shape != s.shape:
        raise MetricsError("labels and scores differ in length")
    n_pos = int(np.sum(y == 1))
    n_neg = int(np.sum(y == 0))
    if n_pos == 0 or n_neg == 0:
        raise MetricsError("ROC needs both classes in y_true")
    order = np.argsort(-s, kind="stable")
    s_sorted, y_sorted = s[order], y[order]
    last_of_group = np.r_[np.flatnonzero(s_sorted[1:] != s_sorted[:-1]), len(s_sorted) - 1]
    tp = np.cumsum(y_sorted)[last_of_group]
    fp = (last_of_group + 1) - tp
    tpr = np.r_[0.0, tp / n_pos]
    fpr = np.r_[0.0, fp / n_neg]
    thresholds = np.r_[np.inf, s_sorted[last_of_group]]
    auc = float(np.sum((fpr[1:] - fpr[:-1]) * (tpr[1:] + tpr[:-1]) / 2.0))
    return RocCurve(fpr, tpr, thresholds, auc)


@dataclass(frozen=True)
class ModelResult:
    name: str
    report: MetricsReport
    auc: float | None
    confusion: ConfusionMatrix = field(compare=False)

    def to_json_dict(self) -> dict:
        return {
            "model": self.name,
            "accuracy": self.report.accuracy,
            "auc": self.auc,
            "per_class": [
                {"label": m.label, "precision": m.precision, "recall": m.recall, "f1": m.f1}
                for m in self.report.per_class
            ],
            "undefined": list(self.report.undefined),
        }


@dataclass(frozen=True)
class ComparisonTable:
    results: tuple

    def to_json_dict(self) -> list:
        return [r.to_json_dict() for r in self.results]

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)

    def render(self) -> str:
        """Aligned text, one row per (model, polarity), values rounded half-up to 2 places."""
        header = f"{'Algorithm':<24}{'Polarity':>9}{'Precision':>11}{'Recall':>8}{'F1 Score':>10}{'Accuracy':>10}{'AUC':>7}"
        lines = [header, "-" * len(header)]
        fmt = lambda v: f"{round_half_up(v):.2f}"  # noqa: E731
        for r in self.results:
            for m in r.report.per_class:
                first = m.label == 0
                lines.append((
                    f"{(r.name if first else ''):<24}{m.label:>9}{fmt(m.precision):>11}"
                    f"{fmt(m.recall):>8}{fmt(m.f1):>10}"
                    f"{(fmt(r.report.accuracy) if first else ''):>10}"
                    f"{((fmt(r.auc) if r.auc is not None else '-') if first else ''):>7}"
                ).rstrip())
        return "\n".join(lines) + "\n"


def evaluate_model(name, model, texts, labels) -> ModelResult:
    """Score one text classifier (anything with predict / predict_score on text)."""
    y_pred = [model.predict(t) for t in texts]
    scores = [model.predict_score(t) for t in texts]
    cm = confusion(labels, y_pred)
    auc = roc_auc(labels, scores).auc if len(set(labels)) == 2 else None
    return ModelResult(name, report(cm), auc, cm)


def compare(models, test) -> ComparisonTable:
    """Evaluate named text classifiers on a test corpus; best accuracy first.

    ``models`` is a mapping name -> classifier; equal accuracies keep the
    mapping's order.
    """
    texts, labels = test.texts, test.labels
    results = [evaluate_model(name, m, texts, labels) for name, m in models.items()]
    results.sort(key=lambda r: -r.report.accuracy)
    return ComparisonTable(tuple(results))
