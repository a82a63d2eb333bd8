"""Labeled feedback sentences: loading, cleaning, splitting and summaries."""
from __future__ import annotations

import csv
import json
from collections import Counter
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path

from . import _rng
from .preprocess import PreprocessConfig, preprocess


class CorpusError(ValueError):
    """Raised for malformed dataset files or invalid corpus operations."""


@dataclass(frozen=True)
class LabeledExample:
    text: str
    label: int

    def __post_init__(self):
        if self.label not in (0, 1):
            raise CorpusError(f"label must be 0 or 1, got {self.label!r}")


@dataclass(frozen=True)
class Corpus:
    examples: tuple[LabeledExample, ...] = ()

    @classmethod
    def from_pairs(cls, pairs) -> "Corpus":
        return cls(tuple(LabeledExample(t, int(y)) for t, y in pairs))

    def __len__(self):
        return len(self.examples)

    def __iter__(self):
        return iter(self.examples)

    def __getitem__(self, i):
        return self.examples[i]

    @property
    def texts(self) -> list[str]:
        return [e.text for e in self.examples]

    @property
    def labels(self) -> list[int]:
        return [e.label for e in self.examples]

    def pairs(self) -> list[tuple[str, int]]:
        return [(e.text, e.label) for e in self.examples]


@dataclass(frozen=True)
class SplitConfig:
    test_fraction: float = 0.2
    seed: int = 0
    stratified: bool = True

    def __post_init__(self):
        if not 0.0 < self.test_fraction < 1.0:
            raise CorpusError(f"test_fraction must lie in (0, 1), got {self.test_fraction}")
        if self.seed < 0:
            raise CorpusError("seed must be a non-negative integer")


@dataclass(frozen=True)
class DatasetSummary:
    count_per_class: dict
    length_histogram: dict
    top_words_per_class: dict

    def to_json_dict(self) -> dict:
        return {
            "class_counts": {str(k): v for k, v in sorted(self.count_per_class.items())},
            "length_histogram": {str(k): v for k, v in sorted(self.length_histogram.items())},
            "top_words": {
                str(k): [[w, c] for w, c in v] for k, v in sorted(self.top_words_per_class.items())
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)


def load_csv(path) -> Corpus:
    """Read a ``text,label`` CSV (RFC-4180 quoting, UTF-8)."""
    path = Path(path)
    if not path.is_file():
        raise CorpusError(f"dataset not found: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise CorpusError(f"{path}: empty file, expected header 'text,label'")
        names = [h.strip().lower() for h in header]
        if "text" not in names or "label" not in names:
            raise CorpusError(f"{path}: header must name columns 'text' and 'label', got {header}")
        ti, li = names.index("text"), names.index("label")
        examples = []
        # row 1 is the header
        for rowno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) <= max(ti, li):
                raise CorpusError(f"{path}: row {rowno}: expected {len(names)} columns, got {len(row)}")
            raw = row[li].strip()
            if raw not in ("0", "1"):
                raise CorpusError(f"{path}: row {rowno}: label must be 0 or 1, got {raw!r}")
            examples.append(LabeledExample(row[ti], int(raw)))
    return Corpus(tuple(examples))


def write_csv(corpus: Corpus, path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["text", "label"])
        for e in corpus:
            writer.writerow([e.text, e.label])


def clean(corpus: Corpus) -> Corpus:
    """Drop blank texts and keep only the first occurrence of each exact text."""
    seen = set()
    kept = []
    for e in corpus:
        if not e.text.strip() or e.text in seen:
            continue
        seen.add(e.text)
        kept.append(e)
    return Corpus(tuple(kept))


def _round_half_up(x: Decimal) -> int:
    return int(x.quantize(Decimal(1), rounding=ROUND_HALF_UP))


def stratified_split(corpus: Corpus, config: SplitConfig) -> tuple[Corpus, Corpus]:
    """Partition ``corpus`` into (train, test), preserving input order in each.

    With stratification each class contributes round_half_up(n_c * f) test
    examples, chosen by a permutation drawn from the ``split`` stream.
    """
    fraction = Decimal(str(config.test_fraction))
    rng = _rng.substream(config.seed, "split")
    n = len(corpus)
    if config.stratified:
        groups = {}
        for i, e in enumerate(corpus):
            groups.setdefault(e.label, []).append(i)
        test_idx = set()
        for label in sorted(groups):
            idx = groups[label]
            if len(idx) < 2:
                raise CorpusError(
                    f"class {label} has {len(idx)} example(s); stratified split needs at least 2"
                )
            k = _round_half_up(len(idx) * fraction)
            perm = rng.permutation(len(idx))
            test_idx.update(idx[j] for j in perm[:k])
    else:
        k = _round_half_up(n * fraction)
        test_idx = set(int(j) for j in rng.permutation(n)[:k])
    train = tuple(e for i, e in enumerate(corpus) if i not in test_idx)
    test = tuple(e for i, e in enumerate(corpus) if i in test_idx)
    return Corpus(train), Corpus(test)


def summarize(corpus: Corpus, top_k: int = 10, bucket_width: int = 5,
              config: PreprocessConfig | None = None) -> DatasetSummary:
    """Class counts, text-length histogram and per-class top words.

    Lengths are whitespace word counts; histogram keys are bucket lower
    bounds. Word frequencies use preprocessed tokens, ties broken
    alphabetically.
    """
    if len(corpus) == 0:
        raise CorpusError("cannot summarize an empty corpus")
    if bucket_width < 1:
        raise CorpusError("bucket_width must be >= 1")
    config = config or PreprocessConfig.default()
    class_counts = Counter(e.label for e in corpus)
    hist = Counter((len(e.text.split()) // bucket_width) * bucket_width for e in corpus)
    words = {label: Counter() for label in class_counts}
    for e in corpus:
        words[e.label].update(preprocess(e.text, config))
    top = {
        label: sorted(c.items(), key=lambda kv: (-kv[1], kv[0]))[:top_k]
        for label, c in words.items()
    }
    return DatasetSummary(dict(class_counts), dict(hist), top)
