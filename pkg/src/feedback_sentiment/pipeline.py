"""Text-level wrappers: preprocessing + vocabulary + fitted model, and their files."""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy.special import expit

from .classifiers import (ClassifierError, LRConfig, RFConfig, SVMConfig, knn_fit, lr_fit,
                          model_from_dict, model_to_dict, nb_fit, rf_fit, svm_fit)
from .features import Vocabulary, build_vocab, featurize, vectorize
from .preprocess import PreprocessConfig, preprocess
from .transformer import TrainConfig, TransformerClassifier, train

BOW_MODELS = ("nb", "lr", "knn", "svm", "rf")
ALL_MODELS = BOW_MODELS + ("transformer",)
DISPLAY_NAMES = {
    "lr": "Logistic regression", "nb": "Naive Bayes", "rf": "Random Forest",
    "knn": "KNN Algorithm", "svm": "Support Vector Machine", "transformer": "Transformer",
}


@dataclass(frozen=True)
class ModelSettings:
    """Hyperparameters for every model; ``seed`` feeds each model's own stream."""

    seed: int = 0
    min_df: int = 1
    binary: bool = False
    nb_alpha: float = 1.0
    lr: LRConfig = LRConfig()
    knn_k: int = 5
    knn_metric: str = "cosine"
    svm: SVMConfig = SVMConfig()
    rf: RFConfig = RFConfig()
    transformer: dict = field(default_factory=dict)
    train: TrainConfig = TrainConfig()


@dataclass(eq=False)
class BowClassifier:
    """Raw text -> preprocess -> BoW vector -> classical model."""

    model: object
    vocab: Vocabulary
    preprocess_config: PreprocessConfig
    binary: bool = False
    preprocess_files: dict = field(default_factory=dict)

    @property
    def model_type(self):
        return self.model.model_type

    def vector(self, text):
        return vectorize(preprocess(text, self.preprocess_config), self.vocab, self.binary)

    def predict(self, text) -> int:
        return self.model.predict(self.vector(text))

    def predict_score(self, text) -> float:
        return self.model.predict_score(self.vector(text))

    def probability(self, text) -> float:
        """P(class 1)-like value in [0, 1]; SVM margins go through a sigmoid."""
        s = self.predict_score(text)
        return float(expit(s)) if self.model_type == "svm" else s

    def predict_proba_many(self, texts):
        p1 = np.array([self.probability(t) for t in texts])
        return np.column_stack([1.0 - p1, p1])

    def to_document(self) -> dict:
        doc = model_to_dict(self.model)
        doc["vocab_sha256"] = self.vocab.sha256()
        doc["vocab_size"] = self.vocab.size
        doc["binary"] = self.binary
        doc["preprocess"] = {
            "stopwords": self.preprocess_files.get("stopwords"),
            "lemma_exceptions": self.preprocess_files.get("lemma_exceptions"),
            "min_token_len": self.preprocess_config.min_token_len,
        }
        return doc


def fit_bow(name, corpus, settings: ModelSettings = ModelSettings(),
            preprocess_config: PreprocessConfig | None = None, preprocess_files=None) -> BowClassifier:
    if name not in BOW_MODELS:
        raise ClassifierError(f"unknown BoW model {name!r}; expected one of {BOW_MODELS}")
    pconf = preprocess_config or PreprocessConfig.default()
    docs = [preprocess(t, pconf) for t in corpus.texts]
    vocab = build_vocab(docs, settings.min_df)
    data = featurize(docs, corpus.labels, vocab, settings.binary)
    s = settings
    if name == "nb":
        model = nb_fit(data, s.nb_alpha)
    elif name == "lr":
        model = lr_fit(data, replace(s.lr, seed=s.seed))
    elif name == "knn":
        model = knn_fit(data, min(s.knn_k, len(data)), s.knn_metric)
    elif name == "svm":
        model = svm_fit(data, replace(s.svm, seed=s.seed))
    else:
        model = rf_fit(data, replace(s.rf, seed=s.seed))
    return BowClassifier(model, vocab, pconf, s.binary, dict(preprocess_files or {}))


def fit_model(name, train_corpus, val_corpus=None, settings: ModelSettings = ModelSettings(),
              preprocess_config=None, preprocess_files=None):
    """Fit any of ``ALL_MODELS``; returns (classifier, TrainLog or None)."""
    if name == "transformer":
        tconf = replace(settings.train, seed=settings.seed)
        return train(train_corpus, val_corpus if val_corpus is not None else train_corpus,
                     settings.transformer, tconf)
    if name not in BOW_MODELS:
        raise ClassifierError(f"unknown model {name!r}; expected one of {ALL_MODELS}")
    return fit_bow(name, train_corpus, settings, preprocess_config, preprocess_files), None


def save_model(clf, out_dir, stem="model") -> Path:
    """Write ``<stem>.json`` (and ``vocab.txt`` for BoW models) into ``out_dir``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"{stem}.json"
    if isinstance(clf, TransformerClassifier):
        clf.save(path)
        return path
    vocab_name = "vocab.txt" if stem == "model" else f"{stem}.vocab.txt"
    clf.vocab.save(out_dir / vocab_name)
    doc = clf.to_document()
    doc["vocab_file"] = vocab_name
    path.write_text(json.dumps(doc), encoding="utf-8")
    return path


def load_model(path):
    """Load a file written by :func:`save_model`."""
    path = Path(path)
    doc = json.loads(path.read_text(encoding="utf-8"))
    if "format" in doc:
        return TransformerClassifier.load(path)
    vocab = Vocabulary.load(path.parent / doc["vocab_file"])
    if vocab.sha256() != doc["vocab_sha256"]:
        raise ClassifierError(f"{path}: vocabulary hash mismatch for {doc['vocab_file']}")
    pp = doc.get("preprocess", {})
    pconf = PreprocessConfig.from_files(pp.get("stopwords"), pp.get("lemma_exceptions"),
                                        min_token_len=pp.get("min_token_len", 1))
    files = {k: pp.get(k) for k in ("stopwords", "lemma_exceptions") if pp.get(k)}
    return BowClassifier(model_from_dict(doc), vocab, pconf, bool(doc.get("binary", False)), files)
