"""Generated corpora whose labels are decided by planted lexicon words."""
from __future__ import annotations

from . import _rng
from .corpus import Corpus

POSITIVE_WORDS = ("helpful", "effective", "excellent", "useful", "enjoyable", "valuable")
NEGATIVE_WORDS = ("confusing", "stressful", "useless", "unfair", "terrible", "pointless")
FILLER_WORDS = (
    "course", "outcome", "assessment", "lecture", "semester", "curriculum", "project",
    "lab", "exam", "grading", "faculty", "student", "syllabus", "module", "feedback",
    "classroom", "assignment", "quiz", "tutorial", "mark", "credit", "program",
    "department", "university", "skill", "learning", "approach", "method", "result",
    "policy", "workload", "schedule", "group", "presentation", "report", "topic",
)


def planted_corpus(n=500, seed=0, positive_fraction=0.6, min_filler=4, max_filler=10,
                   positive_words=POSITIVE_WORDS, negative_words=NEGATIVE_WORDS,
                   filler_words=FILLER_WORDS) -> Corpus:
    """``n`` unique sentences; class-1 ones carry 1-2 positive lexicon words,
    class-0 ones 1-2 negative words, both padded with shared filler.

    The classes are linearly separable in BoW space by construction.
    """
    rng = _rng.substream(seed, "synthetic")
    n_pos = int(round(n * positive_fraction))
    labels = [1] * n_pos + [0] * (n - n_pos)
    labels = [labels[i] for i in rng.permutation(n)]
    seen, pairs = set(), []
    for y in labels:
        lexicon = positive_words if y else negative_words
        while True:
            words = list(rng.choice(filler_words, size=int(rng.integers(min_filler, max_filler + 1))))
            for w in rng.choice(lexicon, size=int(rng.integers(1, 3)), replace=False):
                words.insert(int(rng.integers(0, len(words) + 1)), str(w))
            text = " ".join(words)
            if text not in seen:
                break
        seen.add(text)
        pairs.append((text, y))
    return Corpus.from_pairs(pairs)


def presence_corpus(n=32, word="good", seed=0, filler_words=FILLER_WORDS) -> Corpus:
    """Half the sentences contain ``word`` (label 1), half do not (label 0)."""
    rng = _rng.substream(seed, "presence")
    seen, pairs = set(), []
    for i in range(n):
        y = i % 2
        while True:
            words = [str(w) for w in rng.choice(filler_words, size=int(rng.integers(2, 6)))]
            if y:
                words.insert(int(rng.integers(0, len(words) + 1)), word)
            text = " ".join(words)
            if text not in seen:
                break
        seen.add(text)
        pairs.append((text, y))
    return Corpus.from_pairs(pairs)
