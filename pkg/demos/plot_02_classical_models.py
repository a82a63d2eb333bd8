"""
Bag-of-words classifiers side by side
=====================================

"""

import numpy as np

from feedback_sentiment.classifiers import LRConfig, RFConfig, SVMConfig, knn_fit, lr_fit, nb_fit, rf_fit, svm_fit
from feedback_sentiment.corpus import SplitConfig, stratified_split
from feedback_sentiment.features import build_vocab, featurize, vectorize
from feedback_sentiment.preprocess import PreprocessConfig, preprocess
from feedback_sentiment.synthetic import planted_corpus

corpus = planted_corpus(300, seed=1)
train, test = stratified_split(corpus, SplitConfig(test_fraction=0.2, seed=0))
print(len(train), "train /", len(test), "test")

conf = PreprocessConfig.default()
train_docs = [preprocess(t, conf) for t in train.texts]
test_docs = [preprocess(t, conf) for t in test.texts]

# the vocabulary is built on the training split only
vocab = build_vocab(train_docs)
data = featurize(train_docs, train.labels, vocab)
X_test = featurize(test_docs, test.labels, vocab)
print("vocabulary:", vocab.size, "tokens")

models = {
    "naive bayes": nb_fit(data, alpha=1.0),
    "logistic regression": lr_fit(data, LRConfig(lr=0.1, epochs=300)),
    "knn (k=5, cosine)": knn_fit(data, k=5),
    "linear svm": svm_fit(data, SVMConfig(lam=1e-4, epochs=100)),
    "random forest": rf_fit(data, RFConfig(n_trees=50, n_jobs=4)),
}
y = np.array(test.labels)
for name, m in models.items():
    pred = m.predict_many(X_test.rows)
    print(f"{name:<20} accuracy {np.mean(pred == y):.3f}")

# the logistic regression loss only goes down at this step size
lr = models["logistic regression"]
print("LR loss: first", round(lr.loss_history[0], 4), "last", round(lr.loss_history[-1], 4))

# naive bayes probability for a single new sentence
x = vectorize(preprocess("the lab was confusing", conf), vocab)
print("P(positive | 'the lab was confusing') =", round(models["naive bayes"].predict_score(x), 4))
