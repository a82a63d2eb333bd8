"""Post-LN transformer encoder classifier with hand-written backward pass.

Everything is float64 numpy so that finite-difference gradient checks are
meaningful. Parameters live in a flat ``dict[str, ndarray]``; per-layer
tensors are named ``layers.{i}.{name}``.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
from scipy.special import erf

CLS_ID, PAD_ID, UNK_ID = 0, 1, 2
LN_EPS = 1e-12
_SQRT2 = np.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / np.sqrt(2.0 * np.pi)

LAYER_TENSORS = ("wq", "bq", "wk", "bk", "wv", "bv", "wo", "bo",
                 "ln1_g", "ln1_b", "w1", "b1", "w2", "b2", "ln2_g", "ln2_b")


class TransformerError(RuntimeError):
    pass


@dataclass(frozen=True)
class TransformerConfig:
    vocab_size: int
    d_model: int = 64
    n_heads: int = 4
    n_layers: int = 2
    d_ff: int = 128
    max_seq_len: int = 64
    n_classes: int = 2
    dropout: float = 0.0

    def __post_init__(self):
        if self.d_model % self.n_heads:
            raise ValueError(f"d_model={self.d_model} not divisible by n_heads={self.n_heads}")
        if self.max_seq_len < 2:
            raise ValueError("max_seq_len must be >= 2")
        if self.vocab_size < 3:
            raise ValueError("vocab_size must include the CLS, PAD and UNK ids")
        if self.n_classes != 2:
            raise ValueError("only binary classification is supported")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError("dropout must lie in [0, 1)")

    @property
    def d_head(self):
        return self.d_model // self.n_heads

    def to_dict(self):
        return asdict(self)


def param_shapes(cfg: TransformerConfig) -> dict:
    d, f = cfg.d_model, cfg.d_ff
    shapes = {"tok_emb": (cfg.vocab_size, d), "pos_emb": (cfg.max_seq_len, d)}
    per_layer = {
        "wq": (d, d), "bq": (d,), "wk": (d, d), "bk": (d,), "wv": (d, d), "bv": (d,),
        "wo": (d, d), "bo": (d,), "ln1_g": (d,), "ln1_b": (d,),
        "w1": (d, f), "b1": (f,), "w2": (f, d), "b2": (d,), "ln2_g": (d,), "ln2_b": (d,),
    }
    for i in range(cfg.n_layers):
        for name in LAYER_TENSORS:
            shapes[f"layers.{i}.{name}"] = per_layer[name]
    shapes["head_w"] = (d, cfg.n_classes)
    shapes["head_b"] = (cfg.n_classes,)
    return shapes


def init_params(cfg: TransformerConfig, rng) -> dict:
    """Matrices ~ U(-1/sqrt(d_model), 1/sqrt(d_model)); biases 0; LN gains 1.

    The PAD embedding row starts at zero.
    """
    scale = 1.0 / np.sqrt(cfg.d_model)
    params = {}
    for name, shape in param_shapes(cfg).items():
        short = name.rsplit(".", 1)[-1]
        if short.endswith("_g"):
            params[name] = np.ones(shape)
        elif len(shape) == 1:
            params[name] = np.zeros(shape)
        else:
            params[name] = rng.uniform(-scale, scale, size=shape)
    params["tok_emb"][PAD_ID] = 0.0
    return params


def zero_head(params: dict) -> dict:
    out = dict(params)
    out["head_w"] = np.zeros_like(params["head_w"])
    out["head_b"] = np.zeros_like(params["head_b"])
    return out


def decay_masks(params: dict) -> dict:
    """1 where AdamW weight decay applies: matrices only, minus the PAD row."""
    masks = {}
    for name, p in params.items():
        if p.ndim >= 2:
            m = np.ones_like(p)
            if name == "tok_emb":
                m[PAD_ID] = 0.0
            masks[name] = m
        else:
            masks[name] = np.zeros_like(p)
    return masks


def gelu(u):
    return 0.5 * u * (1.0 + erf(u / _SQRT2))


def gelu_grad(u):
    return 0.5 * (1.0 + erf(u / _SQRT2)) + u * _INV_SQRT_2PI * np.exp(-0.5 * u * u)


def layer_norm(x, g, b):
    mu = x.mean(axis=-1, keepdims=True)
    xc = x - mu
    var = np.mean(xc * xc, axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + LN_EPS)
    xhat = xc * inv
    return xhat * g + b, (xhat, inv)


def layer_norm_backward(dy, g, cache):
    xhat, inv = cache
    dxhat = dy * g
    dx = inv * (dxhat - dxhat.mean(axis=-1, keepdims=True)
                - xhat * np.mean(dxhat * xhat, axis=-1, keepdims=True))
    dg = np.sum(dy * xhat, axis=tuple(range(dy.ndim - 1)))
    db = np.sum(dy, axis=tuple(range(dy.ndim - 1)))
    return dx, dg, db


def softmax(s, axis=-1):
    m = np.max(s, axis=axis, keepdims=True)
    e = np.exp(s - m)
    return e / e.sum(axis=axis, keepdims=True)


def _split_heads(x, n_heads):
    B, T, d = x.shape
    return x.reshape(B, T, n_heads, d // n_heads).transpose(0, 2, 1, 3)


def _merge_heads(x):
    B, H, T, dh = x.shape
    return x.transpose(0, 2, 1, 3).reshape(B, T, H * dh)


def _check_finite(x, what):
    if not np.all(np.isfinite(x)):
        raise TransformerError(f"non-finite activation in {what}")


def forward(params, ids, mask, cfg: TransformerConfig, *, rng=None, return_cache=False):
    """Logits (B, 2) for token ids (B, T) with attention mask (B, T).

    Padding keys get -inf scores before the softmax, so they receive exactly
    zero attention. Dropout is applied to both sublayer outputs only when
    ``cfg.dropout > 0`` and a generator is passed.
    """
    ids = np.asarray(ids)
    mask = np.asarray(mask)
    B, T = ids.shape
    if T > cfg.max_seq_len:
        raise ValueError(f"sequence length {T} exceeds max_seq_len {cfg.max_seq_len}")
    H, dh = cfg.n_heads, cfg.d_head
    use_dropout = cfg.dropout > 0 and rng is not None
    keep = 1.0 - cfg.dropout

    key_bias = np.where(mask[:, None, None, :] > 0, 0.0, -np.inf)
    x = params["tok_emb"][ids] + params["pos_emb"][:T]
    layer_caches = []
    attn_maps = []
    for i in range(cfg.n_layers):
        p = lambda n: params[f"layers.{i}.{n}"]  # noqa: E731
        q = _split_heads(x @ p("wq") + p("bq"), H)
        k = _split_heads(x @ p("wk") + p("bk"), H)
        v = _split_heads(x @ p("wv") + p("bv"), H)
        scores = q @ k.transpose(0, 1, 3, 2) / np.sqrt(dh) + key_bias
        a = softmax(scores)
        ctx = _merge_heads(a @ v)
        o = ctx @ p("wo") + p("bo")
        drop1 = None
        if use_dropout:
            drop1 = (rng.random(o.shape) < keep) / keep
            o = o * drop1
        h, ln1 = layer_norm(x + o, p("ln1_g"), p("ln1_b"))
        u = h @ p("w1") + p("b1")
        gu = gelu(u)
        f = gu @ p("w2") + p("b2")
        drop2 = None
        if use_dropout:
            drop2 = (rng.random(f.shape) < keep) / keep
            f = f * drop2
        x_out, ln2 = layer_norm(h + f, p("ln2_g"), p("ln2_b"))
        _check_finite(x_out, f"layer {i}")
        layer_caches.append(dict(x=x, q=q, k=k, v=v, a=a, ctx=ctx, h=h, u=u, gu=gu,
                                 ln1=ln1, ln2=ln2, drop1=drop1, drop2=drop2))
        attn_maps.append(a)
        x = x_out
    cls = x[:, 0]
    logits = cls @ params["head_w"] + params["head_b"]
    _check_finite(logits, "classifier head")
    if return_cache:
        return logits, dict(ids=ids, layers=layer_caches, cls=cls, attn=attn_maps)
    return logits


def cross_entropy(logits, labels):
    """Mean negative log-likelihood and softmax probabilities."""
    labels = np.asarray(labels)
    m = logits.max(axis=1, keepdims=True)
    lse = m[:, 0] + np.log(np.exp(logits - m).sum(axis=1))
    loss = float(np.mean(lse - logits[np.arange(len(labels)), labels]))
    probs = np.exp(logits - lse[:, None])
    return loss, probs


def loss_and_grads(params, ids, mask, labels, cfg: TransformerConfig, *, rng=None):
    """Mean cross-entropy over the batch and its exact gradient for every tensor."""
    labels = np.asarray(labels, dtype=np.int64)
    if labels.size and (labels.min() < 0 or labels.max() > 1):
        raise ValueError("labels must be 0 or 1")
    logits, cache = forward(params, ids, mask, cfg, rng=rng, return_cache=True)
    loss, probs = cross_entropy(logits, labels)
    if not np.isfinite(loss):
        raise TransformerError(f"non-finite loss {loss}")
    B, T = cache["ids"].shape
    H = cfg.n_heads
    scale = 1.0 / np.sqrt(cfg.d_head)
    grads = {}

    dlogits = probs.copy()
    dlogits[np.arange(B), labels] -= 1.0
    dlogits /= B
    grads["head_w"] = cache["cls"].T @ dlogits
    grads["head_b"] = dlogits.sum(axis=0)
    dx = np.zeros((B, T, cfg.d_model))
    dx[:, 0] = dlogits @ params["head_w"].T

    for i in reversed(range(cfg.n_layers)):
        c = cache["layers"][i]
        pre = f"layers.{i}."
        p = lambda n: params[pre + n]  # noqa: E731
        dz, grads[pre + "ln2_g"], grads[pre + "ln2_b"] = layer_norm_backward(dx, p("ln2_g"), c["ln2"])
        df = dz if c["drop2"] is None else dz * c["drop2"]
        grads[pre + "w2"] = np.einsum("btf,btd->fd", c["gu"], df)
        grads[pre + "b2"] = df.sum(axis=(0, 1))
        du = (df @ p("w2").T) * gelu_grad(c["u"])
        grads[pre + "w1"] = np.einsum("btd,btf->df", c["h"], du)
        grads[pre + "b1"] = du.sum(axis=(0, 1))
        dh = dz + du @ p("w1").T
        dr, grads[pre + "ln1_g"], grads[pre + "ln1_b"] = layer_norm_backward(dh, p("ln1_g"), c["ln1"])
        do = dr if c["drop1"] is None else dr * c["drop1"]
        grads[pre + "wo"] = np.einsum("btd,bte->de", c["ctx"], do)
        grads[pre + "bo"] = do.sum(axis=(0, 1))
        dctx = _split_heads(do @ p("wo").T, H)
        a, q, k, v = c["a"], c["q"], c["k"], c["v"]
        da = dctx @ v.transpose(0, 1, 3, 2)
        dv = a.transpose(0, 1, 3, 2) @ dctx
        ds = a * (da - np.sum(da * a, axis=-1, keepdims=True))
        dq = (ds @ k) * scale
        dk = (ds.transpose(0, 1, 3, 2) @ q) * scale
        dq, dk, dv = _merge_heads(dq), _merge_heads(dk), _merge_heads(dv)
        x_in = c["x"]
        dx = dr.copy()
        for name, d_ in (("q", dq), ("k", dk), ("v", dv)):
            grads[pre + "w" + name] = np.einsum("btd,bte->de", x_in, d_)
            grads[pre + "b" + name] = d_.sum(axis=(0, 1))
            dx += d_ @ p("w" + name).T

    dtok = np.zeros_like(params["tok_emb"])
    np.add.at(dtok, cache["ids"], dx)
    grads["tok_emb"] = dtok
    dpos = np.zeros_like(params["pos_emb"])
    dpos[:T] = dx.sum(axis=0)
    grads["pos_emb"] = dpos
    return loss, grads


def predict_logits(params, ids, mask, cfg):
    return forward(params, ids, mask, cfg)


def attention_maps(params, ids, mask, cfg):
    """Per-layer attention distributions, each (B, H, T, T)."""
    _, cache = forward(params, ids, mask, cfg, return_cache=True)
    return cache["attn"]
