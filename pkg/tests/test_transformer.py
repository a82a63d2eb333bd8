import numpy as np
import pytest

import oracles
from feedback_sentiment.corpus import Corpus
from feedback_sentiment.synthetic import presence_corpus
from feedback_sentiment.transformer import (CLS_ID, PAD_ID, UNK_ID, AdamWState, EncoderTokenizer,
                                            TrainConfig, TransformerClassifier, TransformerConfig,
                                            TransformerError, adamw_step, attention_maps,
                                            cross_entropy, decay_masks, encode_batch, forward,
                                            init_params, layer_norm, loss_and_grads, train,
                                            zero_head)


def _setup(d_model=8, n_heads=2, n_layers=2, d_ff=12, vocab=9, seed=0, T=5):
    cfg = TransformerConfig(vocab, d_model=d_model, n_heads=n_heads, n_layers=n_layers,
                            d_ff=d_ff, max_seq_len=T)
    rng = np.random.default_rng(seed)
    params = init_params(cfg, rng)
    # non-trivial LN and bias values so every group gets a real gradient
    for k, v in params.items():
        if v.ndim == 1:
            params[k] = v + 0.1 * rng.normal(size=v.shape)
    ids = np.array([[CLS_ID, 3, 4, 5, PAD_ID], [CLS_ID, 6, 7, PAD_ID, PAD_ID]])[:, :T]
    mask = (ids != PAD_ID).astype(int)
    return cfg, params, ids, mask, rng


class TestTokenizer:
    def test_encode(self):
        tok = EncoderTokenizer(["obe", "helps"])
        ids, mask = encode_batch(["obe helps"], tok, 4)
        assert ids[0].tolist() == [CLS_ID, tok.word_to_id["obe"], tok.word_to_id["helps"], PAD_ID]
        assert mask[0].tolist() == [1, 1, 1, 0]

    def test_empty(self):
        ids, mask = encode_batch([""], EncoderTokenizer([]), 3)
        assert ids[0].tolist() == [CLS_ID, PAD_ID, PAD_ID] and mask[0].tolist() == [1, 0, 0]

    def test_truncation_and_unk(self):
        ids, mask = encode_batch(["a b c d e f"], EncoderTokenizer(["a"]), 4)
        assert ids.shape == (1, 4) and mask.sum() == 4
        assert ids[0, 2] == UNK_ID

    def test_special_ids(self):
        tok = EncoderTokenizer.fit(["b a", "a"])
        assert tok.words == ("a", "b") and tok.vocab_size == 5
        assert min(tok.word_to_id.values()) == 3


class TestForward:
    def test_zero_head_uniform(self):
        cfg, params, ids, mask, _ = _setup()
        logits = forward(zero_head(params), ids, mask, cfg)
        _, probs = cross_entropy(logits, [0, 1])
        np.testing.assert_array_equal(probs, 0.5)
        loss, _ = cross_entropy(np.zeros((3, 2)), [0, 1, 1])
        np.testing.assert_allclose(loss, np.log(2), rtol=1e-15)

    def test_attention_normalized_and_masked(self):
        cfg, params, ids, mask, _ = _setup(seed=3)
        for a in attention_maps(params, ids, mask, cfg):
            np.testing.assert_allclose(a.sum(axis=-1), 1.0, atol=1e-9)
            pad_keys = np.broadcast_to(mask[:, None, None, :] == 0, a.shape)
            assert np.all(a[pad_keys] == 0.0)

    def test_padding_does_not_change_logits(self):
        cfg, params, ids, mask, _ = _setup(seed=4)
        short = forward(params, ids[:1, :4], mask[:1, :4], cfg)
        longer = forward(params, ids[:1], mask[:1], cfg)
        np.testing.assert_allclose(short, longer, atol=1e-12)

    def test_single_token_attention_is_identity(self):
        d = 4
        cfg = TransformerConfig(5, d_model=d, n_heads=1, n_layers=1, d_ff=4, max_seq_len=2)
        params = init_params(cfg, np.random.default_rng(0))
        for n in ("wq", "wk", "wv", "wo"):
            params[f"layers.0.{n}"] = np.eye(d)
        params["layers.0.w1"] = np.zeros((d, 4))
        params["layers.0.w2"] = np.zeros((4, d))
        ids, mask = np.array([[CLS_ID]]), np.array([[1]])
        _, cache = forward(params, ids, mask, cfg, return_cache=True)
        x = params["tok_emb"][CLS_ID] + params["pos_emb"][0]
        np.testing.assert_allclose(cache["layers"][0]["ctx"][0, 0], x, atol=1e-15)
        np.testing.assert_array_equal(cache["attn"][0], 1.0)

    def test_layer_norm_stats(self):
        x = np.random.default_rng(1).normal(size=(3, 7)) * 5 + 2
        y, _ = layer_norm(x, np.ones(7), np.zeros(7))
        np.testing.assert_allclose(y.mean(-1), 0.0, atol=1e-12)
        np.testing.assert_allclose(y.var(-1), 1.0, atol=1e-9)

    def test_too_long(self):
        cfg, params, _, _, _ = _setup(T=3)
        with pytest.raises(ValueError, match="max_seq_len"):
            forward(params, np.zeros((1, 4), dtype=int), np.ones((1, 4)), cfg)

    def test_non_finite_names_layer(self):
        cfg, params, ids, mask, _ = _setup()
        params["layers.1.w1"] = params["layers.1.w1"] * np.nan
        with pytest.raises(TransformerError, match="layer 1"):
            forward(params, ids, mask, cfg)

    def test_init(self):
        cfg, params, _, _, _ = _setup(d_model=16, n_heads=4)
        assert np.all(params["tok_emb"][PAD_ID] == 0)
        assert np.max(np.abs(params["layers.0.wq"])) <= 1 / 4


class TestGradients:
    @pytest.mark.parametrize("d_model, n_heads, n_layers, d_ff, seed", [
        (8, 2, 2, 12, 0), (8, 1, 1, 8, 1), (4, 2, 2, 6, 2), (8, 4, 1, 16, 3), (6, 3, 2, 5, 4),
    ])
    def test_finite_differences(self, d_model, n_heads, n_layers, d_ff, seed):
        cfg, params, ids, mask, _ = _setup(d_model, n_heads, n_layers, d_ff, seed=seed)
        errs = oracles.transformer_grad_errors(params, ids, mask, np.array([0, 1]), cfg, loss_and_grads)
        bad = {k: v for k, v in errs.items() if not v < 1e-4}
        assert not bad, bad

    def test_unused_rows_have_zero_grad(self):
        cfg, params, ids, mask, _ = _setup()
        _, g = loss_and_grads(params, ids, mask, [0, 1], cfg)
        np.testing.assert_array_equal(g["tok_emb"][8], 0.0)


class TestAdamW:
    def _one(self, g, p=1.0):
        return {"w": np.array([p])}, {"w": np.array([g])}

    def test_zero_grad_no_decay(self):
        params, grads = self._one(0.0, 2.5)
        out, _ = adamw_step(params, grads, AdamWState.zeros_like(params), lr=0.1, decay_mask={"w": 1.0})
        np.testing.assert_array_equal(out["w"], [2.5])

    def test_decay_only(self):
        params = {"m": np.full((2, 2), 3.0), "b": np.ones(2)}
        grads = {k: np.zeros_like(v) for k, v in params.items()}
        out, _ = adamw_step(params, grads, AdamWState.zeros_like(params), lr=0.1, weight_decay=0.01)
        np.testing.assert_allclose(out["m"], 3.0 * (1 - 0.1 * 0.01), rtol=1e-15)
        np.testing.assert_array_equal(out["b"], 1.0)

    @pytest.mark.parametrize("wd", [0.0, 0.1])
    def test_three_step_recurrence(self, wd):
        g, lr, b1, b2, eps = 0.3, 0.01, 0.9, 0.999, 1e-8
        params, grads = self._one(g, 1.0)
        state = AdamWState.zeros_like(params)
        p, m, v = 1.0, 0.0, 0.0
        for t in (1, 2, 3):
            params, state = adamw_step(params, grads, state, lr=lr, beta1=b1, beta2=b2, eps=eps,
                                       weight_decay=wd, decay_mask={"w": 1.0})
            m = b1 * m + (1 - b1) * g
            v = b2 * v + (1 - b2) * g * g
            p = p - lr * (m / (1 - b1 ** t)) / (np.sqrt(v / (1 - b2 ** t)) + eps) - lr * wd * p
            np.testing.assert_allclose(params["w"][0], p, rtol=1e-14)
            np.testing.assert_allclose(state.m["w"][0], m, rtol=1e-14)
            np.testing.assert_allclose(state.v["w"][0], v, rtol=1e-14)
        if wd == 0.0:
            # constant gradient: every bias-corrected step has size lr * g / (|g| + eps)
            np.testing.assert_allclose(params["w"][0], 1.0 - 3 * lr * g / (g + eps), rtol=1e-12)

    def test_pad_row_not_decayed(self):
        cfg, params, _, _, _ = _setup()
        params["tok_emb"][PAD_ID] = 1.0
        grads = {k: np.zeros_like(v) for k, v in params.items()}
        out, _ = adamw_step(params, grads, AdamWState.zeros_like(params), lr=0.1,
                            weight_decay=0.5, decay_mask=decay_masks(params))
        np.testing.assert_array_equal(out["tok_emb"][PAD_ID], 1.0)
        np.testing.assert_array_equal(out["layers.0.ln1_g"], params["layers.0.ln1_g"])


@pytest.fixture(scope="module")
def overfit():
    data = presence_corpus(32, "good")
    model_cfg = {"d_model": 32, "n_heads": 2, "n_layers": 2, "d_ff": 64}
    return train(data, data, model_cfg, TrainConfig(epochs=200))


class TestTraining:
    def test_overfit_presence_word(self, overfit):
        clf, log = overfit
        assert max(log.train_acc) == 1.0
        assert log.train_loss[-1] < log.train_loss[0]
        assert log.train_loss[14] < log.train_loss[0]
        assert clf.predict_score("good course") > 0.9

    def test_deterministic(self):
        data = presence_corpus(16, seed=2)
        cfg = {"d_model": 8, "n_heads": 2, "n_layers": 1, "d_ff": 8}
        a = train(data, data, cfg, TrainConfig(epochs=3, batch_size=4, seed=5))
        b = train(data, data, cfg, TrainConfig(epochs=3, batch_size=4, seed=5))
        assert a[1].to_csv() == b[1].to_csv()
        for k in a[0].params:
            np.testing.assert_array_equal(a[0].params[k], b[0].params[k])

    def test_log_csv(self):
        data = presence_corpus(8)
        _, log = train(data, data, {"d_model": 8, "n_heads": 2, "n_layers": 1, "d_ff": 8},
                       TrainConfig(epochs=4))
        lines = log.to_csv().splitlines()
        assert lines[0] == "epoch,train_loss,train_acc,val_loss,val_acc" and len(lines) == 5

    def test_dropout_runs_deterministically(self):
        data = presence_corpus(8)
        cfg = {"d_model": 8, "n_heads": 2, "n_layers": 1, "d_ff": 8, "dropout": 0.2}
        a = train(data, data, cfg, TrainConfig(epochs=2))[1].to_csv()
        assert a == train(data, data, cfg, TrainConfig(epochs=2))[1].to_csv()

    def test_weights_roundtrip(self, tmp_path, overfit):
        clf = overfit[0]
        clf.save(tmp_path / "w.json")
        back = TransformerClassifier.load(tmp_path / "w.json")
        texts = ["good course", "exam lab", "unseen words here"]
        np.testing.assert_array_equal(clf.predict_proba_many(texts), back.predict_proba_many(texts))

    def test_zero_head_predicts_half(self, overfit):
        clf = overfit[0]
        z = TransformerClassifier(zero_head(clf.params), clf.config, clf.tokenizer)
        np.testing.assert_array_equal(z.predict_proba("good course"), [0.5, 0.5])

    def test_bad_weight_file(self, tmp_path):
        (tmp_path / "w.json").write_text('{"format": "other"}')
        with pytest.raises(ValueError):
            TransformerClassifier.load(tmp_path / "w.json")

    def test_empty_corpus(self):
        with pytest.raises(ValueError):
            train(Corpus(()), presence_corpus(4))
