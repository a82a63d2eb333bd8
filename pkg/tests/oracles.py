"""Brute-force reference implementations used by the test-suite.

These are written independently of the package code: plain Python loops,
direct probabilities, exhaustive enumeration.
"""
import math
from itertools import product

import numpy as np


def nb_posterior(docs, labels, query, vocab, alpha=1.0):
    """P(y=1 | query) from raw token lists, multiplying probabilities directly."""
    V = len(vocab)
    joint = {}
    for c in (0, 1):
        class_docs = [d for d, y in zip(docs, labels) if y == c]
        prior = len(class_docs) / len(docs)
        tokens = [t for d in class_docs for t in d if t in vocab]
        p = prior
        for t in query:
            if t in vocab:
                p *= (tokens.count(t) + alpha) / (len(tokens) + alpha * V)
        joint[c] = p
    return joint[1] / (joint[0] + joint[1])


def cosine_distance(a, b):
    na = math.sqrt(sum(v * v for v in a))
    nb = math.sqrt(sum(v * v for v in b))
    if na * nb == 0:
        return 1.0
    return 1.0 - sum(u * v for u, v in zip(a, b)) / (na * nb)


def knn_predict(X, y, x, k):
    """Exhaustive: distance to every row, sort by (distance, index), vote."""
    ranked = sorted((cosine_distance(list(row), list(x)), i) for i, row in enumerate(X))[:k]
    labels = [int(y[i]) for _, i in ranked]
    ones = sum(labels)
    if 2 * ones != k:
        return int(2 * ones > k), ones / k
    s1 = sum(d for d, i in ranked if y[i] == 1)
    s0 = sum(d for d, i in ranked if y[i] == 0)
    return int(s1 < s0), ones / k


def tree_walk(params, x):
    """Route ``x`` through a serialized tree dict by hand."""
    node = 0
    while params["feature"][node] != -1:
        f, t = params["feature"][node], params["threshold"][node]
        node = params["right"][node] if x[f] >= t else params["left"][node]
    return params["label"][node]


def auc_pairs(y, s):
    """Mann-Whitney: fraction of (pos, neg) pairs ranked correctly, ties 1/2."""
    pos = [si for yi, si in zip(y, s) if yi == 1]
    neg = [si for yi, si in zip(y, s) if yi == 0]
    total = 0.0
    for p in pos:
        for n in neg:
            total += 1.0 if p > n else 0.5 if p == n else 0.0
    return total / (len(pos) * len(neg))


def weighted_lstsq(X, y, w):
    """Weighted least squares with intercept via the normal equations."""
    A = np.column_stack([np.ones(len(X)), X])
    G = A.T @ (w[:, None] * A)
    rhs = A.T @ (w * y)
    beta = np.linalg.solve(G, rhs)
    return beta[1:], beta[0]


def all_masks(n):
    return np.array(list(product((1, 0), repeat=n)), dtype=float)


def central_diff(f, x, h):
    """Numerical gradient of scalar ``f`` at array ``x`` (modified in place, restored)."""
    g = np.zeros_like(x)
    it = np.nditer(x, flags=["multi_index"])
    for _ in it:
        i = it.multi_index
        old = x[i]
        x[i] = old + h
        fp = f()
        x[i] = old - h
        fm = f()
        x[i] = old
        g[i] = (fp - fm) / (2 * h)
    return g


def relative_error(analytic, numeric, floor=1e-6):
    """max |a - n| scaled by the larger gradient magnitude (floored for all-zero groups)."""
    scale = max(np.max(np.abs(analytic)), np.max(np.abs(numeric)), floor)
    return float(np.max(np.abs(analytic - numeric)) / scale)


def transformer_grad_errors(params, ids, mask, labels, cfg, loss_fn, h=1e-4, names=None):
    """Per-tensor relative error of ``loss_fn``'s analytic gradients vs central differences."""
    _, grads = loss_fn(params, ids, mask, labels, cfg)
    errors = {}
    for name in names or params:
        p = params[name]
        num = central_diff(lambda: loss_fn(params, ids, mask, labels, cfg)[0], p, h)
        errors[name] = relative_error(grads[name], num)
    return errors
