"""Bag-of-Words vocabulary and sparse count vectors."""
from __future__ import annotations

import hashlib
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from types import MappingProxyType

import numpy as np


class Vocabulary:
    """Frozen token -> index mapping, indices assigned in sorted token order."""

    def __init__(self, tokens):
        ordered = sorted(set(tokens))
        self._tokens = tuple(ordered)
        self._index = MappingProxyType({t: i for i, t in enumerate(ordered)})

    @property
    def index_of(self):
        return self._index

    @property
    def tokens(self) -> tuple[str, ...]:
        return self._tokens

    @property
    def size(self) -> int:
        return len(self._tokens)

    def __len__(self):
        return len(self._tokens)

    def __contains__(self, token):
        return token in self._index

    def __eq__(self, other):
        return isinstance(other, Vocabulary) and self._tokens == other._tokens

    def __hash__(self):
        return hash(self._tokens)

    def __repr__(self):
        return f"Vocabulary(size={self.size})"

    def to_text(self) -> str:
        return "".join(t + "\n" for t in self._tokens)

    def sha256(self) -> str:
        return hashlib.sha256(self.to_text().encode("utf-8")).hexdigest()

    def save(self, path) -> None:
        Path(path).write_text(self.to_text(), encoding="utf-8")

    @classmethod
    def load(cls, path) -> "Vocabulary":
        tokens = Path(path).read_text(encoding="utf-8").splitlines()
        if tokens != sorted(set(tokens)):
            raise ValueError(f"{path}: vocabulary file must hold unique tokens in sorted order")
        return cls(tokens)


@dataclass(frozen=True)
class SparseVector:
    """Ordered (index, count) pairs with strictly increasing indices."""

    indices: tuple[int, ...] = ()
    counts: tuple[int, ...] = ()

    @property
    def entries(self):
        return list(zip(self.indices, self.counts))

    def __len__(self):
        return len(self.indices)

    def total(self) -> int:
        return sum(self.counts)

    def binary(self) -> "SparseVector":
        return SparseVector(self.indices, tuple(1 for _ in self.indices))

    def to_dense(self, size: int) -> np.ndarray:
        out = np.zeros(size, dtype=np.float64)
        out[list(self.indices)] = self.counts
        return out


@dataclass(frozen=True)
class FeatureMatrix:
    rows: tuple[SparseVector, ...]
    labels: tuple[int, ...]
    vocab: Vocabulary

    def __post_init__(self):
        if len(self.rows) != len(self.labels):
            raise ValueError(f"{len(self.rows)} rows but {len(self.labels)} labels")

    def __len__(self):
        return len(self.rows)

    def dense(self) -> np.ndarray:
        X = np.zeros((len(self.rows), self.vocab.size), dtype=np.float64)
        for i, row in enumerate(self.rows):
            X[i, list(row.indices)] = row.counts
        return X

    def y(self) -> np.ndarray:
        return np.asarray(self.labels, dtype=np.int64)


def build_vocab(docs, min_df: int = 1) -> Vocabulary:
    """Tokens that occur in at least ``min_df`` distinct documents."""
    if min_df < 1:
        raise ValueError("min_df must be >= 1")
    df = Counter()
    for doc in docs:
        df.update(set(doc))
    vocab = Vocabulary(t for t, n in df.items() if n >= min_df)
    if vocab.size == 0:
        raise ValueError(f"empty vocabulary (min_df={min_df})")
    return vocab


def vectorize(doc, vocab: Vocabulary, binary: bool = False) -> SparseVector:
    """Count in-vocabulary tokens; unknown tokens are dropped."""
    counts = Counter(vocab.index_of[t] for t in doc if t in vocab.index_of)
    idx = tuple(sorted(counts))
    vals = tuple(1 if binary else counts[i] for i in idx)
    return SparseVector(idx, vals)


def featurize(docs, labels, vocab: Vocabulary, binary: bool = False) -> FeatureMatrix:
    return FeatureMatrix(tuple(vectorize(d, vocab, binary) for d in docs), tuple(int(y) for y in labels), vocab)
