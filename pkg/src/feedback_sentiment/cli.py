"""Command-line entry point: summary, prep, train, evaluate, compare, explain.

Option values resolve as: explicit flag > ``--config`` file > built-in default.
The config file holds ``key = value`` lines whose keys are the long flag names
without the leading dashes (``lr.epochs = 300``); unknown keys are rejected.

Exit codes: 0 success, 1 computation failure, 2 usage or input error.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .classifiers import DivergenceError, LRConfig, RFConfig, SVMConfig
from .corpus import SplitConfig, clean, load_csv, stratified_split, summarize
from .explain import ExplanationError, LimeConfig, explain, scorer_from_model
from .features import build_vocab
from .metrics import ComparisonTable, compare, evaluate_model
from .pipeline import ALL_MODELS, DISPLAY_NAMES, ModelSettings, fit_model, load_model, save_model
from .preprocess import PreprocessConfig, preprocess
from .transformer import TrainConfig, TransformerError

EXIT_OK, EXIT_FAILURE, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _bool(v):
    if isinstance(v, bool):
        return v
    s = str(v).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {v!r}")


def _opt_int(v):
    return None if str(v).strip().lower() in ("none", "") else int(v)


@dataclass(frozen=True)
class Option:
    flag: str
    type: object
    default: object
    help: str

    @property
    def key(self):
        return self.flag.lstrip("-")

    @property
    def dest(self):
        return self.key.replace(".", "__").replace("-", "_")


COMMON = [
    Option("--dataset", str, None, "CSV with header text,label"),
    Option("--seed", int, 0, "global seed; split/shuffle/init/lime streams derive from it"),
    Option("--test-fraction", float, 0.2, "held-out fraction for the stratified split"),
    Option("--out", str, None, "output directory"),
    Option("--stopwords", str, None, "stopword file, one word per line (bundled list if unset)"),
    Option("--lemma-exceptions", str, None, "form<TAB>lemma file (bundled table if unset)"),
    Option("--min-token-len", int, 1, "drop tokens shorter than this"),
]
FEATURES = [
    Option("--min-df", int, 1, "minimum document frequency for the BoW vocabulary"),
    Option("--binary", _bool, False, "presence (1/0) features instead of counts"),
]
MODELS = [
    Option("--nb.alpha", float, 1.0, "Naive Bayes Laplace smoothing"),
    Option("--lr.lr", float, LRConfig.lr, "logistic regression learning rate"),
    Option("--lr.l2", float, LRConfig.l2, "logistic regression L2 strength"),
    Option("--lr.epochs", int, LRConfig.epochs, "logistic regression full-batch steps"),
    Option("--knn.k", int, 5, "KNN neighbour count"),
    Option("--knn.metric", str, "cosine", "KNN distance: cosine or euclidean"),
    Option("--svm.lambda", float, SVMConfig.lam, "SVM regularization"),
    Option("--svm.epochs", int, SVMConfig.epochs, "SVM passes over the data"),
    Option("--rf.trees", int, RFConfig.n_trees, "random forest size"),
    Option("--rf.max-depth", _opt_int, RFConfig.max_depth, "tree depth limit ('none' = unbounded)"),
    Option("--rf.features-per-split", _opt_int, None, "features tried per split (default ceil(sqrt(V)))"),
    Option("--rf.jobs", int, 1, "threads for tree fitting (results do not depend on it)"),
    Option("--transformer.d-model", int, 64, "encoder width"),
    Option("--transformer.heads", int, 4, "attention heads"),
    Option("--transformer.layers", int, 2, "encoder layers"),
    Option("--transformer.d-ff", int, 128, "feed-forward width"),
    Option("--transformer.max-seq-len", int, 64, "max tokens including [CLS]"),
    Option("--transformer.dropout", float, 0.0, "dropout rate (0 disables)"),
    Option("--transformer.lr", float, TrainConfig.lr, "AdamW learning rate"),
    Option("--transformer.weight-decay", float, TrainConfig.weight_decay, "AdamW weight decay"),
    Option("--transformer.beta1", float, TrainConfig.beta1, "AdamW beta1"),
    Option("--transformer.beta2", float, TrainConfig.beta2, "AdamW beta2"),
    Option("--transformer.eps", float, TrainConfig.eps, "AdamW epsilon"),
    Option("--epochs", int, TrainConfig.epochs, "transformer training epochs"),
    Option("--batch-size", int, TrainConfig.batch_size, "transformer batch size"),
]
LIME = [
    Option("--lime.samples", int, 1000, "perturbations for sentences longer than 10 words"),
    Option("--lime.kernel-width", float, 25.0, "proximity kernel width"),
    Option("--lime.top-k", int, 6, "words reported"),
    Option("--lime.ridge", float, 1.0, "surrogate ridge strength"),
    Option("--lime.skip-stopwords", _bool, False, "never report stopwords as features"),
]
SUMMARY = [
    Option("--top-k", int, 10, "top words per class"),
    Option("--bucket-width", int, 5, "text-length histogram bucket width (words)"),
]

COMMANDS = {
    "summary": (COMMON + SUMMARY, "class counts, text-length histogram, top words (JSON)"),
    "prep": (COMMON + FEATURES, "write preprocessed tokens and the BoW vocabulary"),
    "train": (COMMON + FEATURES + MODELS, "train one model on the train split"),
    "evaluate": (COMMON, "score a saved model on the test split"),
    "compare": (COMMON + FEATURES + MODELS, "train all models and emit the comparison table"),
    "explain": (COMMON + LIME, "LIME explanation of one sentence"),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="feedback-sentiment", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (options, help_) in COMMANDS.items():
        p = sub.add_parser(name, help=help_, description=help_)
        if name == "train":
            p.add_argument("model", choices=ALL_MODELS, help="model to train")
        if name in ("evaluate", "explain"):
            p.add_argument("--model", dest="model_path", required=True, help="saved model JSON")
        if name == "explain":
            p.add_argument("--text", required=True, help="sentence to explain")
        if name == "compare":
            p.add_argument("--models", default=",".join(ALL_MODELS),
                           help=f"comma-separated subset of {','.join(ALL_MODELS)} (default: all)")
        p.add_argument("--config", default=None, help="key = value file; flags override it")
        for opt in options:
            p.add_argument(opt.flag, dest=opt.dest, type=opt.type, default=None,
                           metavar=opt.key.rsplit(".", 1)[-1].upper().replace("-", "_"),
                           help=f"{opt.help} (default: {opt.default})")
    return parser


def read_config_file(path, options) -> dict:
    known = {o.key: o for o in options}
    values = {}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}") from exc
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in known:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            values[known[key].dest] = known[key].type(raw)
        except ValueError as exc:
            raise UsageError(f"{path}:{lineno}: bad value for {key}: {exc}") from exc
    return values


def resolve(args, command) -> dict:
    options = COMMANDS[command][0]
    from_file = read_config_file(args.config, options) if args.config else {}
    cfg = {}
    for opt in options:
        v = getattr(args, opt.dest)
        if v is None:
            v = from_file.get(opt.dest, opt.default)
        cfg[opt.dest] = v
    return cfg


def _preprocess_config(cfg):
    try:
        return PreprocessConfig.from_files(cfg["stopwords"], cfg["lemma_exceptions"],
                                           min_token_len=cfg["min_token_len"])
    except (OSError, ValueError) as exc:
        raise UsageError(str(exc)) from exc


def _preprocess_files(cfg):
    return {k: str(Path(cfg[k]).resolve()) for k in ("stopwords", "lemma_exceptions") if cfg[k]}


def _settings(cfg) -> ModelSettings:
    return ModelSettings(
        seed=cfg["seed"], min_df=cfg["min_df"], binary=cfg["binary"], nb_alpha=cfg["nb__alpha"],
        lr=LRConfig(cfg["lr__lr"], cfg["lr__l2"], cfg["lr__epochs"]),
        knn_k=cfg["knn__k"], knn_metric=cfg["knn__metric"],
        svm=SVMConfig(cfg["svm__lambda"], cfg["svm__epochs"]),
        rf=RFConfig(cfg["rf__trees"], cfg["rf__max_depth"], cfg["rf__features_per_split"],
                    n_jobs=cfg["rf__jobs"]),
        transformer=dict(d_model=cfg["transformer__d_model"], n_heads=cfg["transformer__heads"],
                         n_layers=cfg["transformer__layers"], d_ff=cfg["transformer__d_ff"],
                         max_seq_len=cfg["transformer__max_seq_len"],
                         dropout=cfg["transformer__dropout"]),
        train=TrainConfig(cfg["batch_size"], cfg["epochs"], cfg["transformer__lr"],
                          cfg["transformer__beta1"], cfg["transformer__beta2"],
                          cfg["transformer__eps"], cfg["transformer__weight_decay"]),
    )


def _load_dataset(cfg):
    if not cfg["dataset"]:
        raise UsageError("--dataset is required")
    return clean(load_csv(cfg["dataset"]))


def _split(cfg, corpus):
    return stratified_split(corpus, SplitConfig(cfg["test_fraction"], cfg["seed"], True))


def _out_dir(cfg, required=False):
    if not cfg["out"]:
        if required:
            raise UsageError("--out is required")
        return None
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write(path, text):
    Path(path).write_text(text, encoding="utf-8")


def cmd_summary(args, cfg, stdout):
    corpus = _load_dataset(cfg)
    s = summarize(corpus, cfg["top_k"], cfg["bucket_width"], _preprocess_config(cfg))
    text = s.to_json() + "\n"
    out = _out_dir(cfg)
    if out:
        _write(out / "summary.json", text)
    stdout.write(text)


def cmd_prep(args, cfg, stdout):
    corpus = _load_dataset(cfg)
    out = _out_dir(cfg, required=True)
    pconf = _preprocess_config(cfg)
    docs = [preprocess(t, pconf) for t in corpus.texts]
    vocab = build_vocab(docs, cfg["min_df"])
    lines = "".join(f"{y}\t{' '.join(d)}\n" for d, y in zip(docs, corpus.labels))
    _write(out / "tokens.tsv", lines)
    vocab.save(out / "vocab.txt")
    stdout.write(f"{len(docs)} documents, vocabulary of {vocab.size} tokens -> {out}\n")


def cmd_train(args, cfg, stdout):
    corpus = _load_dataset(cfg)
    out = _out_dir(cfg, required=True)
    train, test = _split(cfg, corpus)
    clf, log = fit_model(args.model, train, test, _settings(cfg), _preprocess_config(cfg),
                         _preprocess_files(cfg))
    path = save_model(clf, out)
    stdout.write(f"wrote {path}\n")
    if log is not None:
        _write(out / "trainlog.csv", log.to_csv())
        stdout.write(f"wrote {out / 'trainlog.csv'} ({len(log)} epochs)\n")


def cmd_evaluate(args, cfg, stdout):
    corpus = _load_dataset(cfg)
    clf = _load_model(args.model_path)
    _, test = _split(cfg, corpus)
    result = evaluate_model(DISPLAY_NAMES.get(clf.model_type, clf.model_type), clf,
                            test.texts, test.labels)
    text = json.dumps(result.to_json_dict(), indent=2) + "\n"
    out = _out_dir(cfg)
    if out:
        _write(out / "evaluation.json", text)
    stdout.write(text)


def cmd_compare(args, cfg, stdout):
    names = [m.strip() for m in args.models.split(",") if m.strip()]
    unknown = [m for m in names if m not in ALL_MODELS]
    if unknown or not names:
        raise UsageError(f"unknown model(s) {unknown}; choose from {','.join(ALL_MODELS)}")
    corpus = _load_dataset(cfg)
    out = _out_dir(cfg)
    train, test = _split(cfg, corpus)
    settings, pconf, pfiles = _settings(cfg), _preprocess_config(cfg), _preprocess_files(cfg)
    fitted = {}
    for name in names:
        clf, log = fit_model(name, train, test, settings, pconf, pfiles)
        fitted[DISPLAY_NAMES[name]] = clf
        if log is not None and out:
            _write(out / "trainlog.csv", log.to_csv())
    table: ComparisonTable = compare(fitted, test)
    rendered = table.render()
    if out:
        _write(out / "comparison.json", table.to_json() + "\n")
        _write(out / "comparison.txt", rendered)
        _write(out / "split.json", json.dumps({
            "train": len(train), "test": len(test),
            "train_per_class": {str(c): train.labels.count(c) for c in (0, 1)},
            "test_per_class": {str(c): test.labels.count(c) for c in (0, 1)},
        }, indent=2) + "\n")
    stdout.write(rendered)


def cmd_explain(args, cfg, stdout):
    if not args.text.strip():
        raise UsageError("--text must not be empty")
    clf = _load_model(args.model_path)
    skip = frozenset()
    if cfg["lime__skip_stopwords"]:
        skip = _preprocess_config(cfg).stopwords
    lime = LimeConfig(n_samples=cfg["lime__samples"], kernel_width=cfg["lime__kernel_width"],
                      top_k=cfg["lime__top_k"], ridge=cfg["lime__ridge"], seed=cfg["seed"],
                      skip_words=skip)
    exp = explain(args.text, scorer_from_model(clf), lime)
    text = exp.to_json() + "\n"
    out = _out_dir(cfg)
    if out:
        _write(out / "explanation.json", text)
        _write(out / "explanation.txt", exp.render_bars())
    stdout.write(text)
    stdout.write(exp.render_bars())


def _load_model(path):
    try:
        return load_model(path)
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(f"cannot load model {path}: {exc}") from exc


HANDLERS = {
    "summary": cmd_summary, "prep": cmd_prep, "train": cmd_train,
    "evaluate": cmd_evaluate, "compare": cmd_compare, "explain": cmd_explain,
}


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = resolve(args, args.command)
        HANDLERS[args.command](args, cfg, stdout)
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except (ExplanationError, TransformerError, DivergenceError, ArithmeticError) as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_FAILURE
    except (UsageError, ValueError, OSError) as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
