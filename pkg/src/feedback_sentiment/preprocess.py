"""Tokenization, stopword removal and a rule-based lemmatizer.

The lemmatizer is two-stage: an exception table of irregular forms
(``taught -> teach``) is consulted first, otherwise ordered suffix rules are
applied until no rule fires. A rule whose replacement equals its suffix is a
protection rule: it matches, changes nothing and stops the search (this keeps
``class`` from losing its final ``s``).
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path

_SPLIT = re.compile(r"[^a-z0-9]+")

DEFAULT_SUFFIX_RULES = (
    ("ing", ""),
    ("ed", ""),
    ("sses", "ss"),
    ("ches", "ch"),
    ("shes", "sh"),
    ("xes", "x"),
    ("zes", "z"),
    ("ies", "y"),
    ("ss", "ss"),
    ("us", "us"),
    ("is", "is"),
    ("s", ""),
    ("ever", "ever"),
    ("ther", "ther"),
    ("er", ""),
)

# stripping these can leave a doubled final consonant: running -> runn -> run
DEFAULT_UNDOUBLE_AFTER = ("ing", "ed", "er")
_NO_UNDOUBLE = set("aeioulsz")


def load_word_list(path) -> frozenset[str]:
    """One lowercase entry per line; blank lines and ``#`` comments skipped."""
    words = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(line.lower())
    return frozenset(words)


def load_exception_table(path) -> dict[str, str]:
    """Read ``form<TAB>lemma`` lines."""
    table = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0] or not parts[1]:
            raise ValueError(f"{path}:{lineno}: expected 'form<TAB>lemma', got {line!r}")
        table[parts[0].lower()] = parts[1].lower()
    return table


def _bundled(name):
    return resources.files("feedback_sentiment") / "data" / name


@lru_cache(maxsize=1)
def _default_resources():
    with resources.as_file(_bundled("stopwords_en.txt")) as p:
        stopwords = load_word_list(p)
    with resources.as_file(_bundled("lemma_exceptions.tsv")) as p:
        exceptions = load_exception_table(p)
    return stopwords, exceptions


@dataclass(frozen=True)
class PreprocessConfig:
    stopwords: frozenset = frozenset()
    lemma_exceptions: dict = field(default_factory=dict)
    suffix_rules: tuple = DEFAULT_SUFFIX_RULES
    min_token_len: int = 1
    min_stem_len: int = 3
    undouble_after: tuple = DEFAULT_UNDOUBLE_AFTER

    def __post_init__(self):
        if self.min_token_len < 1:
            raise ValueError("min_token_len must be >= 1")

    @classmethod
    def default(cls, **overrides) -> "PreprocessConfig":
        """Bundled 179-word English stopword list and irregular-form table."""
        stopwords, exceptions = _default_resources()
        kwargs = dict(stopwords=stopwords, lemma_exceptions=dict(exceptions))
        kwargs.update(overrides)
        return cls(**kwargs)

    @classmethod
    def from_files(cls, stopwords_path=None, exceptions_path=None, **overrides):
        stopwords, exceptions = _default_resources()
        if stopwords_path is not None:
            stopwords = load_word_list(stopwords_path)
        if exceptions_path is not None:
            exceptions = load_exception_table(exceptions_path)
        return cls(stopwords=stopwords, lemma_exceptions=dict(exceptions), **overrides)


def tokenize(text: str, min_token_len: int = 1) -> list[str]:
    """Lowercase and split on every run of non-alphanumeric characters."""
    return [t for t in _SPLIT.split(text.lower()) if len(t) >= min_token_len]


def remove_stopwords(tokens, stopwords) -> list[str]:
    return [t for t in tokens if t not in stopwords]


def _undouble(stem):
    if len(stem) >= 2 and stem[-1] == stem[-2] and stem[-1] not in _NO_UNDOUBLE:
        return stem[:-1]
    return stem


def _apply_first_rule(token, config):
    """Return the rewritten token, or None when no rule changes it."""
    for suffix, replacement in config.suffix_rules:
        if not token.endswith(suffix):
            continue
        if suffix == replacement:
            return None
        stem = token[: len(token) - len(suffix)]
        candidate = stem + replacement
        if len(candidate) < config.min_stem_len:
            continue
        if not replacement and suffix in config.undouble_after:
            undoubled = _undouble(candidate)
            if len(undoubled) >= config.min_stem_len:
                candidate = undoubled
        return candidate
    return None


def lemmatize(token: str, config: PreprocessConfig) -> str:
    """Map ``token`` to its lemma.

    The exception table wins whenever the current form is listed; otherwise
    suffix rules are applied repeatedly (each application shortens the token,
    so this terminates) until none fires.
    """
    while True:
        lemma = config.lemma_exceptions.get(token)
        if lemma is not None:
            return lemma
        rewritten = _apply_first_rule(token, config)
        if rewritten is None:
            return token
        token = rewritten


def preprocess(text: str, config: PreprocessConfig) -> tuple[str, ...]:
    """Tokenize, drop stopwords, lemmatize survivors.

    A lemma that is itself a stopword (``wills -> will``) or too short is
    dropped as well, so the output never contains a stopword.
    """
    tokens = remove_stopwords(tokenize(text, config.min_token_len), config.stopwords)
    out = []
    for t in tokens:
        lemma = lemmatize(t, config)
        if lemma not in config.stopwords and len(lemma) >= config.min_token_len:
            out.append(lemma)
    return tuple(out)


def preprocess_many(texts, config: PreprocessConfig) -> list[tuple[str, ...]]:
    return [preprocess(t, config) for t in texts]
