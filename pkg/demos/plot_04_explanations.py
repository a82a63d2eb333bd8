"""
Which words drive a prediction?
===============================

"""

from feedback_sentiment.explain import LimeConfig, explain, scorer_from_model
from feedback_sentiment.pipeline import fit_bow
from feedback_sentiment.preprocess import PreprocessConfig
from feedback_sentiment.synthetic import planted_corpus

# start with a scorer whose answer we know: presence of one word
helps = lambda texts: [1.0 if "helps" in t.split() else 0.0 for t in texts]  # noqa: E731
e = explain("obe really helps students", helps, LimeConfig(ridge=0.0, top_k=4))
print(e.render_bars())

# short sentences enumerate every mask; longer ones are sampled with a fixed seed
clf = fit_bow("nb", planted_corpus(400, seed=3))
scorer = scorer_from_model(clf)
for text in ("the lecture was helpful and the exam was useful",
             "the grading was unfair and the workload stressful for every student in the course"):
    e = explain(text, scorer, LimeConfig(top_k=4, seed=0))
    print(text)
    print(e.render_bars())

# function words can be kept out of the report
stop = PreprocessConfig.default().stopwords
e = explain("the lecture was helpful", scorer, LimeConfig(top_k=4, skip_words=stop))
print([w for _, w, _ in e.word_weights])
