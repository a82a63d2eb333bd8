"""LIME-style local explanations for text classifiers.

Perturbations delete words from the sentence (one mask bit per word
position), are weighted by an exponential kernel on cosine distance to the
original, and a weighted ridge surrogate is fitted to the black-box scores.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _rng


class ExplanationError(RuntimeError):
    pass


@dataclass(frozen=True)
class LimeConfig:
    n_samples: int = 1000
    kernel_width: float = 25.0
    top_k: int = 6
    ridge: float = 1.0
    seed: int = 0
    enumerate_max_words: int = 10
    skip_words: frozenset = frozenset()  # lowercase words never reported as features

    def __post_init__(self):
        if self.n_samples < 2:
            raise ValueError("n_samples must be >= 2")
        if not self.kernel_width > 0:
            raise ValueError("kernel_width must be > 0")
        if self.ridge < 0:
            raise ValueError("ridge must be >= 0")
        if self.top_k < 1:
            raise ValueError("top_k must be >= 1")


@dataclass(frozen=True)
class Explanation:
    text: str
    word_weights: tuple  # (position, word, weight), largest |weight| first
    intercept: float
    local_score: float
    predicted_proba: float

    def weight_of(self, word) -> float:
        """Summed weight for every selected position holding ``word``."""
        return sum(w for _, wd, w in self.word_weights if wd == word)

    def to_json_dict(self) -> dict:
        return {
            "text": self.text,
            "predicted_proba": self.predicted_proba,
            "intercept": self.intercept,
            "local_score": self.local_score,
            "words": [{"position": p, "word": w, "weight": v} for p, w, v in self.word_weights],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)

    def render_bars(self, width: int = 30) -> str:
        if not self.word_weights:
            return "(no features)\n"
        top = max(abs(v) for _, _, v in self.word_weights) or 1.0
        wlen = max(len(w) for _, w, _ in self.word_weights)
        lines = [f"P(positive) = {self.predicted_proba:.4f}"]
        for _, w, v in self.word_weights:
            bar = ("+" if v >= 0 else "-") * int(round(width * abs(v) / top))
            lines.append(f"{w:<{wlen}} {v:+.4f} {bar}")
        return "\n".join(lines) + "\n"


def apply_mask(words, mask) -> str:
    return " ".join(w for w, keep in zip(words, mask) if keep)


def perturb(text: str, config: LimeConfig):
    """Masks and perturbed texts; the first mask keeps every word.

    Sentences of at most ``enumerate_max_words`` words get all 2**n masks
    (including the empty one). Longer sentences get ``n_samples - 1`` random
    masks: remove a uniform count in 1..n of uniformly chosen positions,
    redrawing whenever every word would be removed.
    """
    words = text.split()
    n = len(words)
    if n == 0:
        raise ExplanationError("cannot explain an empty text")
    if n <= config.enumerate_max_words:
        masks = np.array(list(itertools.product((1, 0), repeat=n)), dtype=np.int8)
    else:
        rng = _rng.substream(config.seed, "lime")
        masks = np.ones((config.n_samples, n), dtype=np.int8)
        for row in masks[1:]:
            k = n
            while k == n:
                k = int(rng.integers(1, n + 1))
            row[rng.choice(n, size=k, replace=False)] = 0
    return [(m, apply_mask(words, m)) for m in masks]


def kernel_weight(mask, sigma: float) -> float:
    """exp(-d^2 / sigma^2), d the cosine distance from ``mask`` to all-ones."""
    mask = np.asarray(mask)
    if mask.size == 0:
        raise ExplanationError("empty mask")
    d = 1.0 - np.sqrt(np.count_nonzero(mask) / mask.size)
    return float(np.exp(-(d * d) / (sigma * sigma)))


EXACT_MAX_FEATURES = 12


def _dyadic_ints(values):
    """Scale finite floats to integers sharing one power-of-two denominator."""
    fr = [Fraction(float(v)) for v in values]
    shift = max((f.denominator.bit_length() - 1 for f in fr), default=0)
    return [f.numerator << (shift - (f.denominator.bit_length() - 1)) for f in fr], shift


def _solve_fractions(A, b):
    """Gauss-Jordan elimination over Fractions; None if singular."""
    n = len(A)
    M = [row[:] + [b[i]] for i, row in enumerate(A)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            return None
        M[col], M[piv] = M[piv], M[col]
        inv = 1 / M[col][col]
        M[col] = [v * inv for v in M[col]]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [a - f * c for a, c in zip(M[r], M[col])]
    return [M[i][n] for i in range(n)]


def _exact_weighted_ridge(X, y, w, lam):
    """Exact rational solve of the augmented weighted normal equations.

    Every float is a dyadic rational, so when ``y`` is exactly a linear
    function of the columns the fitted coefficients are exactly that
    function, rounded once to float at the end.
    """
    N, p = X.shape
    xs, kx = _dyadic_ints(X.ravel())
    xs = [[1 << kx] + xs[r * p:(r + 1) * p] for r in range(N)]  # leading intercept column
    ws, kw = _dyadic_ints(w)
    ys, ky = _dyadic_ints(y)
    q = p + 1
    G = [[0] * q for _ in range(q)]
    rhs = [0] * q
    for r in range(N):
        row, wr = xs[r], ws[r]
        if wr == 0:
            continue
        wy = wr * ys[r]
        for i in range(q):
            wi = wr * row[i]
            if wi == 0:
                continue
            rhs[i] += wy * row[i]
            Gi = G[i]
            for j in range(i, q):
                Gi[j] += wi * row[j]
    # G has scale 2^-(kw+2kx), rhs 2^-(kw+kx+ky); bring both to 2^-(kw+2kx+ky)
    A = [[Fraction(G[min(i, j)][max(i, j)] << ky) for j in range(q)] for i in range(q)]
    b = [Fraction(v << kx) for v in rhs]
    if lam:
        pen = Fraction(float(lam)) * (1 << (kw + 2 * kx + ky))
        for i in range(1, q):
            A[i][i] += pen
    sol = _solve_fractions(A, b)
    if sol is None:
        return None
    return np.array([float(v) for v in sol[1:]]), float(sol[0])


def weighted_ridge(X, y, w, lam, exact=None):
    """Ridge with an unpenalized intercept: returns (coef, intercept).

    Small designs (``exact=None`` and at most EXACT_MAX_FEATURES columns) are
    solved in exact rational arithmetic; larger ones in float64.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    if exact is None:
        exact = X.shape[1] <= EXACT_MAX_FEATURES
    if exact:
        solved = _exact_weighted_ridge(X, y, w, lam)
        if solved is not None:
            return solved
    sw = w.sum()
    x_mean = w @ X / sw
    y_mean = w @ y / sw
    Xc = X - x_mean
    yc = y - y_mean
    A = Xc.T @ (w[:, None] * Xc) + lam * np.eye(X.shape[1])
    b = Xc.T @ (w * yc)
    try:
        coef = np.linalg.solve(A, b)
    except np.linalg.LinAlgError:
        coef = np.linalg.lstsq(A, b, rcond=None)[0]
    return coef, float(y_mean - x_mean @ coef)


def weighted_r2(y, y_hat, w) -> float:
    y_mean = w @ y / w.sum()
    ss_res = float(w @ (y - y_hat) ** 2)
    ss_tot = float(w @ (y - y_mean) ** 2)
    if ss_tot == 0.0:
        return 1.0 if ss_res == 0.0 else 0.0
    return 1.0 - ss_res / ss_tot


def fit_surrogate(masks, scores, weights, config: LimeConfig, words=None, text="",
                  predicted_proba=None) -> Explanation:
    """Rank word positions by |ridge coefficient|, keep ``top_k``, refit on those."""
    X = np.asarray(masks, dtype=np.float64)
    y = np.asarray(scores, dtype=np.float64)
    w = np.asarray(weights, dtype=np.float64)
    if X.ndim != 2 or len(X) < 2 or len(np.unique(X, axis=0)) < 2:
        raise ExplanationError("need at least two distinct masks")
    n = X.shape[1]
    words = list(words) if words is not None else [str(i) for i in range(n)]
    candidates = [i for i in range(n) if words[i].lower() not in config.skip_words]
    if not candidates:
        intercept = float(w @ y / w.sum())
        return Explanation(text, (), intercept, weighted_r2(y, np.full_like(y, intercept), w),
                           float(y[0] if predicted_proba is None else predicted_proba))
    coef, _ = weighted_ridge(X[:, candidates], y, w, config.ridge)
    # stable sort: equal magnitudes keep the earlier position
    ranked = sorted(range(len(candidates)), key=lambda j: -abs(coef[j]))
    keep = sorted(candidates[j] for j in ranked[: config.top_k])
    coef_k, intercept = weighted_ridge(X[:, keep], y, w, config.ridge)
    y_hat = X[:, keep] @ coef_k + intercept
    triples = sorted(((p, words[p], float(c)) for p, c in zip(keep, coef_k)),
                     key=lambda t: (-abs(t[2]), t[0]))
    return Explanation(text, tuple(triples), intercept, weighted_r2(y, y_hat, w),
                       float(y[0] if predicted_proba is None else predicted_proba))


def _score_all(scorer, texts):
    try:
        out = np.asarray(scorer(texts), dtype=np.float64).ravel()
    except Exception:
        # find the offending perturbation
        for t in texts:
            try:
                scorer([t])
            except Exception as exc:
                raise ExplanationError(f"scorer failed on perturbed text {t!r}: {exc}") from exc
        raise
    if out.shape != (len(texts),):
        raise ExplanationError(f"scorer returned {out.shape} values for {len(texts)} texts")
    bad = np.flatnonzero(~np.isfinite(out) | (out < 0) | (out > 1))
    if bad.size:
        t = texts[bad[0]]
        raise ExplanationError(f"scorer returned {out[bad[0]]} (not a probability) for {t!r}")
    return out


def explain(text: str, scorer, config: LimeConfig = LimeConfig()) -> Explanation:
    """Explain ``scorer`` around ``text``.

    ``scorer`` maps a list of strings to P(class 1) for each.
    """
    samples = perturb(text, config)
    masks = np.array([m for m, _ in samples])
    texts = [t for _, t in samples]
    scores = _score_all(scorer, texts)
    weights = np.array([kernel_weight(m, config.kernel_width) for m in masks])
    return fit_surrogate(masks, scores, weights, config, words=text.split(), text=text,
                         predicted_proba=float(scores[0]))


def scorer_from_model(model):
    """Adapt a text classifier exposing ``predict_score(text)``."""
    batch = getattr(model, "predict_proba_many", None)
    if batch is not None:
        return lambda texts: batch(texts)[:, 1]
    return lambda texts: [model.predict_score(t) for t in texts]
