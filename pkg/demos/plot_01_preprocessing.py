"""
Cleaning and tokenizing feedback sentences
==========================================

"""

from feedback_sentiment.corpus import Corpus, clean, summarize
from feedback_sentiment.preprocess import PreprocessConfig, lemmatize, preprocess, tokenize

# raw feedback, including a blank row and an exact duplicate
raw = Corpus.from_pairs([
    ("The teachers are teaching us how to think", 1),
    ("OBE helps me plan my studies", 1),
    ("   ", 0),
    ("Too many problems we face in assessments", 0),
    ("OBE helps me plan my studies", 1),
    ("I wish I could say something good but I can't because it's too bad", 0),
])
corpus = clean(raw)
print(len(raw), "rows ->", len(corpus), "after dropping blanks and duplicates")

# lowercase, split on anything that is not a letter or digit
print(tokenize("It's too bad!"))

# lemmas come from an exception table first, suffix rules after
conf = PreprocessConfig.default()
for word in ("taught", "teaching", "teachers", "studies", "problems", "went"):
    print(f"{word:>10} -> {lemmatize(word, conf)}")

# stopwords are dropped after lemmatizing
for text in corpus.texts:
    print(preprocess(text, conf))

# a custom stopword list keeps "too" (useful for negative feedback)
keep_too = PreprocessConfig.default(stopwords=conf.stopwords - {"too"})
print(preprocess("it's too bad", keep_too))

summary = summarize(corpus, top_k=3, bucket_width=5)
print(summary.to_json())
