"""Mini-batch AdamW training loop, per-epoch tracking and the weight file."""
from __future__ import annotations

import io
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .. import _rng
from .model import (TransformerConfig, TransformerError, cross_entropy, decay_masks, forward,
                    init_params, loss_and_grads, param_shapes)
from .optim import AdamWState, adamw_step
from .tokenizer import EncoderTokenizer, batch_length, encode_batch

WEIGHT_FORMAT = "feedback-sentiment-transformer"
WEIGHT_VERSION = 1


class TrainingDiverged(TransformerError):
    def __init__(self, epoch, detail):
        super().__init__(f"training diverged in epoch {epoch}: {detail}")
        self.epoch = epoch


@dataclass(frozen=True)
class TrainConfig:
    batch_size: int = 16
    epochs: int = 15
    lr: float = 5e-4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    weight_decay: float = 0.01
    seed: int = 0

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")


@dataclass
class TrainLog:
    train_loss: list = field(default_factory=list)
    train_acc: list = field(default_factory=list)
    val_loss: list = field(default_factory=list)
    val_acc: list = field(default_factory=list)

    def __len__(self):
        return len(self.train_loss)

    def append(self, train_loss, train_acc, val_loss, val_acc):
        self.train_loss.append(train_loss)
        self.train_acc.append(train_acc)
        self.val_loss.append(val_loss)
        self.val_acc.append(val_acc)

    def rows(self):
        return [(e + 1, self.train_loss[e], self.train_acc[e], self.val_loss[e], self.val_acc[e])
                for e in range(len(self))]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("epoch,train_loss,train_acc,val_loss,val_acc\n")
        for row in self.rows():
            buf.write(",".join([str(row[0])] + [repr(float(v)) for v in row[1:]]) + "\n")
        return buf.getvalue()


@dataclass(eq=False)
class TransformerClassifier:
    """Fitted encoder bundled with its tokenizer; scores raw text."""

    params: dict
    config: TransformerConfig
    tokenizer: EncoderTokenizer

    model_type = "transformer"

    def encode(self, texts):
        return encode_batch(texts, self.tokenizer,
                            batch_length(texts, self.tokenizer, self.config.max_seq_len))

    def predict_proba_many(self, texts, batch_size=64) -> np.ndarray:
        out = []
        for s in range(0, len(texts), batch_size):
            chunk = list(texts[s:s + batch_size])
            ids, mask = self.encode(chunk)
            logits = forward(self.params, ids, mask, self.config)
            out.append(cross_entropy(logits, np.zeros(len(chunk), dtype=np.int64))[1])
        return np.vstack(out) if out else np.zeros((0, 2))

    def predict_proba(self, text) -> np.ndarray:
        return self.predict_proba_many([text])[0]

    def predict_score(self, text) -> float:
        return float(self.predict_proba(text)[1])

    def predict(self, text) -> int:
        return int(self.predict_score(text) >= 0.5)

    def save(self, path) -> None:
        save_weights(path, self.params, self.config, self.tokenizer)

    @classmethod
    def load(cls, path) -> "TransformerClassifier":
        return cls(*load_weights(path))


def predict_proba(params, text, tokenizer, config) -> np.ndarray:
    """[P(class 0), P(class 1)] for one sentence."""
    return TransformerClassifier(params, config, tokenizer).predict_proba(text)


def evaluate(params, texts, labels, tokenizer, config, batch_size=16):
    """Mean cross-entropy and accuracy over a dataset (no dropout)."""
    labels = np.asarray(labels, dtype=np.int64)
    total_loss = 0.0
    correct = 0
    for s in range(0, len(texts), batch_size):
        chunk = list(texts[s:s + batch_size])
        ids, mask = encode_batch(chunk, tokenizer, batch_length(chunk, tokenizer, config.max_seq_len))
        logits = forward(params, ids, mask, config)
        loss, probs = cross_entropy(logits, labels[s:s + batch_size])
        total_loss += loss * len(chunk)
        correct += int(np.sum(np.argmax(probs, axis=1) == labels[s:s + batch_size]))
    n = len(texts)
    return total_loss / n, correct / n


def train(train_corpus, val_corpus, model_config: TransformerConfig | dict | None = None,
          train_config: TrainConfig = TrainConfig(), tokenizer: EncoderTokenizer | None = None):
    """Fit a fresh encoder; returns (TransformerClassifier, TrainLog).

    ``model_config`` may be a TransformerConfig or a dict of overrides; the
    vocabulary size always comes from the tokenizer, which is fitted on the
    training texts unless supplied.
    """
    if len(train_corpus) == 0 or len(val_corpus) == 0:
        raise ValueError("train and validation corpora must be non-empty")
    train_texts, train_labels = train_corpus.texts, np.asarray(train_corpus.labels, dtype=np.int64)
    val_texts, val_labels = val_corpus.texts, val_corpus.labels
    tokenizer = tokenizer or EncoderTokenizer.fit(train_texts)
    if isinstance(model_config, TransformerConfig):
        overrides = asdict(model_config)
    else:
        overrides = dict(model_config or {})
    overrides["vocab_size"] = tokenizer.vocab_size
    cfg = TransformerConfig(**overrides)

    seed = train_config.seed
    params = init_params(cfg, _rng.substream(seed, "init"))
    shuffle_rng = _rng.substream(seed, "shuffle")
    dropout_rng = _rng.substream(seed, "dropout") if cfg.dropout > 0 else None
    masks = decay_masks(params)
    state = AdamWState.zeros_like(params)
    log = TrainLog()
    bs = train_config.batch_size
    for epoch in range(1, train_config.epochs + 1):
        order = shuffle_rng.permutation(len(train_texts))
        for s in range(0, len(order), bs):
            idx = order[s:s + bs]
            chunk = [train_texts[i] for i in idx]
            ids, mask = encode_batch(chunk, tokenizer, batch_length(chunk, tokenizer, cfg.max_seq_len))
            try:
                _, grads = loss_and_grads(params, ids, mask, train_labels[idx], cfg, rng=dropout_rng)
            except TransformerError as exc:
                raise TrainingDiverged(epoch, str(exc)) from exc
            params, state = adamw_step(
                params, grads, state, lr=train_config.lr, beta1=train_config.beta1,
                beta2=train_config.beta2, eps=train_config.eps,
                weight_decay=train_config.weight_decay, decay_mask=masks)
        try:
            tr = evaluate(params, train_texts, train_labels, tokenizer, cfg, bs)
            va = evaluate(params, val_texts, val_labels, tokenizer, cfg, bs)
        except TransformerError as exc:
            raise TrainingDiverged(epoch, str(exc)) from exc
        if not (np.isfinite(tr[0]) and np.isfinite(va[0])):
            raise TrainingDiverged(epoch, f"non-finite loss (train={tr[0]}, val={va[0]})")
        log.append(tr[0], tr[1], va[0], va[1])
    return TransformerClassifier(params, cfg, tokenizer), log


def save_weights(path, params, config: TransformerConfig, tokenizer: EncoderTokenizer) -> None:
    """JSON: config block, vocabulary, and row-major flat tensors with shapes."""
    doc = {
        "format": WEIGHT_FORMAT,
        "version": WEIGHT_VERSION,
        "config": config.to_dict(),
        "vocabulary": list(tokenizer.words),
        "tensors": {name: {"shape": list(params[name].shape),
                           "data": params[name].ravel(order="C").tolist()}
                    for name in param_shapes(config)},
    }
    Path(path).write_text(json.dumps(doc), encoding="utf-8")


def load_weights(path):
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if doc.get("format") != WEIGHT_FORMAT or doc.get("version") != WEIGHT_VERSION:
        raise ValueError(f"{path}: not a version-{WEIGHT_VERSION} {WEIGHT_FORMAT} weight file")
    cfg = TransformerConfig(**doc["config"])
    tokenizer = EncoderTokenizer(doc["vocabulary"])
    if tokenizer.vocab_size != cfg.vocab_size:
        raise ValueError(f"{path}: vocabulary has {tokenizer.vocab_size} ids, config says {cfg.vocab_size}")
    params = {}
    for name, shape in param_shapes(cfg).items():
        t = doc["tensors"].get(name)
        if t is None:
            raise ValueError(f"{path}: missing tensor {name}")
        if tuple(t["shape"]) != tuple(shape):
            raise ValueError(f"{path}: tensor {name} has shape {t['shape']}, expected {list(shape)}")
        params[name] = np.asarray(t["data"], dtype=np.float64).reshape(shape)
    return params, cfg, tokenizer
