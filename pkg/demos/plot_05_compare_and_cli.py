"""
Comparing every model, from Python and from the shell
=====================================================

"""

import subprocess
import sys
import tempfile
from pathlib import Path

from feedback_sentiment.corpus import SplitConfig, stratified_split, write_csv
from feedback_sentiment.metrics import compare
from feedback_sentiment.pipeline import DISPLAY_NAMES, ModelSettings, fit_model
from feedback_sentiment.synthetic import planted_corpus
from feedback_sentiment.transformer import TrainConfig

corpus = planted_corpus(300, seed=5)
train, test = stratified_split(corpus, SplitConfig(0.2, seed=0))

settings = ModelSettings(seed=0, transformer={"d_model": 32, "n_heads": 2}, train=TrainConfig(epochs=5))
fitted = {DISPLAY_NAMES[m]: fit_model(m, train, test, settings)[0]
          for m in ("nb", "lr", "knn", "svm", "rf", "transformer")}
table = compare(fitted, test)
print(table.render())

# the same thing through the command line, writing files to a directory
work = Path(tempfile.mkdtemp())
write_csv(corpus, work / "feedback.csv")
cli = [sys.executable, "-m", "feedback_sentiment"]
subprocess.run(cli + ["compare", "--dataset", str(work / "feedback.csv"), "--models", "nb,lr,svm",
                      "--out", str(work / "cmp")], check=True)
print(sorted(p.name for p in (work / "cmp").iterdir()))

subprocess.run(cli + ["train", "nb", "--dataset", str(work / "feedback.csv"), "--out", str(work / "nb")], check=True)
subprocess.run(cli + ["explain", "--model", str(work / "nb" / "model.json"),
                      "--text", "the tutorial was helpful", "--lime.top-k", "3"], check=True)
