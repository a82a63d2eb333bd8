"""
Training a small transformer encoder from scratch
=================================================

"""

import numpy as np

from feedback_sentiment.synthetic import presence_corpus
from feedback_sentiment.transformer import (TrainConfig, TransformerClassifier, attention_maps,
                                            encode_batch, train)

# label 1 exactly when the sentence contains "good"
data = presence_corpus(32, word="good")
for text, label in data.pairs()[:4]:
    print(label, text)

# desk-scale defaults: d_model 64, 4 heads, 2 layers, AdamW lr 5e-4
clf, log = train(data, data, None, TrainConfig(epochs=30, batch_size=16, seed=0))
for epoch, tr_loss, tr_acc, _, _ in log.rows()[::5]:
    print(f"epoch {epoch:>3}  loss {tr_loss:.4f}  acc {tr_acc:.3f}")

for text in ("good course", "course lab exam", "the exam was good"):
    print(f"{text!r:>22}: P(1) = {clf.predict_score(text):.4f}")

# attention rows are distributions over the non-padding positions
ids, mask = encode_batch(["good course", "exam"], clf.tokenizer, 4)
maps = attention_maps(clf.params, ids, mask, clf.config)
print("layer 0, head 0, sentence 2:\n", np.round(maps[0][1, 0], 3))

# weights round-trip through a plain JSON file
clf.save("/tmp/presence_model.json")
back = TransformerClassifier.load("/tmp/presence_model.json")
print("reloaded equal:", np.array_equal(back.predict_proba("good course"), clf.predict_proba("good course")))
