import numpy as np
import pytest

import oracles
from feedback_sentiment.explain import (Explanation, ExplanationError, LimeConfig, apply_mask, explain,
                                        fit_surrogate, kernel_weight, perturb, scorer_from_model,
                                        weighted_ridge)


def presence(word):
    return lambda texts: [1.0 if word in t.split() else 0.0 for t in texts]


def _random_scorer(seed):
    """Fixed random per-word effects pushed through a sigmoid (non-linear in the mask)."""
    rng = np.random.default_rng(seed)
    table = {}

    def score(texts):
        out = []
        for t in texts:
            z = sum(table.setdefault(w, rng.normal()) for w in t.split())
            out.append(1 / (1 + np.exp(-z)))
        return out
    return score


class TestPerturb:
    def test_apply_mask(self):
        assert apply_mask(["obe", "helps"], [1, 1]) == "obe helps"
        assert apply_mask(["obe", "helps"], [1, 0]) == "obe"

    def test_enumeration(self):
        samples = perturb("a b c", LimeConfig())
        masks = np.array([m for m, _ in samples])
        assert len(masks) == 8 and len({tuple(m) for m in masks}) == 8
        assert masks[0].tolist() == [1, 1, 1]

    def test_sampling_deterministic(self):
        text = " ".join(f"w{i}" for i in range(14))
        cfg = LimeConfig(n_samples=200, seed=3)
        a = np.array([m for m, _ in perturb(text, cfg)])
        b = np.array([m for m, _ in perturb(text, cfg)])
        np.testing.assert_array_equal(a, b)
        assert a.shape == (200, 14)
        assert a[0].all() and a[1:].sum(1).max() < 14 and a.sum(1).min() >= 1

    def test_empty(self):
        with pytest.raises(ExplanationError):
            perturb("   ", LimeConfig())


class TestKernel:
    def test_identity(self):
        assert kernel_weight([1, 1, 1], 25.0) == 1.0

    def test_quarter(self):
        assert kernel_weight([1, 0, 0, 0], 25.0) == pytest.approx(np.exp(-0.25 / 625), abs=1e-15)

    def test_monotone(self):
        w = [kernel_weight([1] * k + [0] * (6 - k), 2.0) for k in range(7)]
        assert all(a <= b for a, b in zip(w, w[1:]))


class TestSurrogate:
    def test_presence_word_exact(self):
        e = explain("obe good course", presence("good"), LimeConfig(ridge=0.0, top_k=3))
        weights = {w: c for _, w, c in e.word_weights}
        assert weights == {"good": 1.0, "obe": 0.0, "course": 0.0}
        assert e.intercept == 0.0 and e.local_score == 1.0

    @pytest.mark.parametrize("seed, n_words", [(0, 3), (1, 5), (2, 7), (3, 10)])
    def test_normal_equations_oracle(self, seed, n_words):
        text = " ".join(f"w{i}" for i in range(n_words))
        scorer = _random_scorer(seed)
        cfg = LimeConfig(ridge=0.0, top_k=n_words, kernel_width=0.75)
        e = explain(text, scorer, cfg)
        X = oracles.all_masks(n_words)
        y = np.array(scorer([apply_mask(text.split(), m) for m in X]))
        w = np.array([kernel_weight(m, cfg.kernel_width) for m in X])
        coef, intercept = oracles.weighted_lstsq(X, y, w)
        got = np.zeros(n_words)
        for p, _, c in e.word_weights:
            got[p] = c
        np.testing.assert_allclose(got, coef, atol=1e-8, rtol=0)
        np.testing.assert_allclose(e.intercept, intercept, atol=1e-8)

    def test_ridge_matches_float_path(self):
        rng = np.random.default_rng(0)
        X, y, w = rng.integers(0, 2, (40, 5)).astype(float), rng.random(40), rng.random(40)
        a = weighted_ridge(X, y, w, 0.5, exact=True)
        b = weighted_ridge(X, y, w, 0.5, exact=False)
        np.testing.assert_allclose(a[0], b[0], atol=1e-10)
        np.testing.assert_allclose(a[1], b[1], atol=1e-10)

    def test_constant_scorer(self):
        e = explain("it is fine here", lambda ts: [0.7] * len(ts), LimeConfig())
        assert all(abs(c) <= 1e-9 for _, _, c in e.word_weights)
        assert e.intercept == pytest.approx(0.7, abs=1e-9)

    def test_top_positive_word(self):
        e = explain("obe really helps students", presence("helps"), LimeConfig(top_k=2))
        assert e.word_weights[0][1] == "helps" and e.word_weights[0][2] > 0

    def test_negative_sign(self):
        e = explain("exam was too bad", lambda ts: [0.0 if "bad" in t.split() else 1.0 for t in ts],
                    LimeConfig(ridge=0.0, top_k=1))
        assert e.word_weights[0][1] == "bad" and e.word_weights[0][2] == -1.0

    def test_long_sentence_sampling(self):
        text = "the new outcome based system really helps students plan every single course well"
        e = explain(text, presence("helps"), LimeConfig(n_samples=400, top_k=3))
        assert e.word_weights[0][1] == "helps"
        assert e.weight_of("helps") > 0.5

    def test_deterministic(self):
        text = " ".join(f"w{i}" for i in range(13))
        cfg = LimeConfig(n_samples=300, seed=9)
        assert explain(text, _random_scorer(1), cfg) == explain(text, _random_scorer(1), cfg)

    def test_skip_words(self):
        e = explain("the exam helps", presence("the"), LimeConfig(skip_words=frozenset({"the"})))
        assert "the" not in [w for _, w, _ in e.word_weights]

    def test_top_k(self):
        e = explain("a b c d e f g h", _random_scorer(4), LimeConfig(top_k=3))
        assert len(e.word_weights) == 3
        mags = [abs(c) for _, _, c in e.word_weights]
        assert mags == sorted(mags, reverse=True)

    def test_single_mask_rejected(self):
        with pytest.raises(ExplanationError):
            fit_surrogate(np.ones((3, 2)), [1, 1, 1], [1, 1, 1], LimeConfig())


class TestScorerErrors:
    def test_bad_probability(self):
        with pytest.raises(ExplanationError, match="not a probability"):
            explain("a b", lambda ts: [2.0] * len(ts))

    def test_failure_names_text(self):
        def scorer(texts):
            if "" in texts:
                raise RuntimeError("boom")
            return [0.5] * len(texts)
        with pytest.raises(ExplanationError, match="perturbed text ''"):
            explain("a b", scorer)

    def test_wrong_length(self):
        with pytest.raises(ExplanationError):
            explain("a b", lambda ts: [0.5])


def test_json_and_bars():
    e = explain("obe good course", presence("good"), LimeConfig(ridge=0.0, top_k=2))
    assert isinstance(e, Explanation)
    assert '"word": "good"' in e.to_json()
    assert e.render_bars().splitlines()[1].startswith("good")


def test_scorer_from_model():
    class M:
        def predict_score(self, t):
            return 0.25
    assert scorer_from_model(M())(["x", "y"]) == [0.25, 0.25]
