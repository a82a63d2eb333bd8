"""Word-level tokenizer for the encoder: CLS=0, PAD=1, UNK=2, words from 3."""
from __future__ import annotations

import numpy as np

from ..preprocess import tokenize
from .model import CLS_ID, PAD_ID, UNK_ID

SPECIAL_TOKENS = ("[CLS]", "[PAD]", "[UNK]")


class EncoderTokenizer:
    def __init__(self, words):
        self.words = tuple(sorted(set(words)))
        self.word_to_id = {w: i + len(SPECIAL_TOKENS) for i, w in enumerate(self.words)}

    @classmethod
    def fit(cls, texts, min_count=1):
        counts = {}
        for t in texts:
            for w in tokenize(t):
                counts[w] = counts.get(w, 0) + 1
        return cls(w for w, c in counts.items() if c >= min_count)

    @property
    def vocab_size(self):
        return len(self.words) + len(SPECIAL_TOKENS)

    def ids(self, text):
        return [self.word_to_id.get(w, UNK_ID) for w in tokenize(text)]

    def __eq__(self, other):
        return isinstance(other, EncoderTokenizer) and self.words == other.words


def encode_batch(texts, tok: EncoderTokenizer, max_len: int):
    """[CLS] + word ids, truncated to ``max_len`` and right-padded with PAD."""
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    ids = np.full((len(texts), max_len), PAD_ID, dtype=np.int64)
    mask = np.zeros((len(texts), max_len), dtype=np.int64)
    for i, text in enumerate(texts):
        seq = ([CLS_ID] + tok.ids(text))[:max_len]
        ids[i, : len(seq)] = seq
        mask[i, : len(seq)] = 1
    return ids, mask


def batch_length(texts, tok: EncoderTokenizer, max_seq_len: int) -> int:
    """Shortest padding length that fits every text in the batch."""
    longest = max((len(tok.ids(t)) for t in texts), default=0) + 1
    return min(max_seq_len, max(longest, 2))
