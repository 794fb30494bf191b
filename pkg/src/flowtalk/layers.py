"""Array-level neural net primitives with hand-written backward passes.

Every ``*_fwd`` returns ``(out, cache)`` and the matching ``*_bwd`` maps
``(dout, cache)`` to input gradients plus parameter gradients. Shapes use
trailing feature axes so the same primitives serve tokens of any batch
layout. The attention softmax runs through the switchable kernel backend.
"""

from __future__ import annotations

import numpy as np

from . import kernels

LN_EPS = 1e-6
_GELU_C = 0.7978845608028654  # sqrt(2/pi)


def init_linear(rng, d_in, d_out, dtype, scale=None):
    if scale is None:
        scale = 1.0 / np.sqrt(d_in)
    w = (rng.standard_normal((d_in, d_out)) * scale).astype(dtype)
    b = np.zeros(d_out, dtype=dtype)
    return w, b


def linear_fwd(x, w, b):
    return x @ w + b, x


def linear_bwd(dout, x, w):
    x2 = x.reshape(-1, x.shape[-1])
    d2 = dout.reshape(-1, dout.shape[-1])
    dw = x2.T @ d2
    db = d2.sum(axis=0)
    dx = dout @ w.T
    return dx, dw, db


def layernorm_fwd(x, g, b):
    mu = x.mean(axis=-1, keepdims=True)
    xc = x - mu
    var = (xc * xc).mean(axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + LN_EPS)
    xhat = xc * inv
    return xhat * g + b, (xhat, inv)


def layernorm_bwd(dout, cache, g):
    xhat, inv = cache
    dg = (dout * xhat).reshape(-1, xhat.shape[-1]).sum(axis=0)
    db = dout.reshape(-1, dout.shape[-1]).sum(axis=0)
    dxhat = dout * g
    m1 = dxhat.mean(axis=-1, keepdims=True)
    m2 = (dxhat * xhat).mean(axis=-1, keepdims=True)
    dx = (dxhat - m1 - xhat * m2) * inv
    return dx, dg, db


def gelu_fwd(x):
    t = np.tanh(_GELU_C * (x + 0.044715 * x**3))
    return 0.5 * x * (1.0 + t), (x, t)


def gelu_bwd(dout, cache):
    x, t = cache
    dt = _GELU_C * (1.0 + 3 * 0.044715 * x * x) * (1.0 - t * t)
    return dout * (0.5 * (1.0 + t) + 0.5 * x * dt)


def _split_heads(x, heads):
    b, t, d = x.shape
    return x.reshape(b, t, heads, d // heads).transpose(0, 2, 1, 3)


def _merge_heads(x):
    b, h, t, dh = x.shape
    return x.transpose(0, 2, 1, 3).reshape(b, t, h * dh)


def mha_fwd(xq, xkv, p, prefix, heads):
    """Multi-head attention. ``p[prefix + '.Wq']`` etc. hold parameters;
    ``xkv`` may have a different feature width than ``xq``."""
    q = xq @ p[prefix + ".Wq"] + p[prefix + ".bq"]
    k = xkv @ p[prefix + ".Wk"] + p[prefix + ".bk"]
    v = xkv @ p[prefix + ".Wv"] + p[prefix + ".bv"]
    qh = _split_heads(q, heads)
    kh = _split_heads(k, heads)
    vh = _split_heads(v, heads)
    scale = 1.0 / np.sqrt(qh.shape[-1])
    scores = (qh @ kh.swapaxes(-1, -2)) * scale
    b, h, tq, tk = scores.shape
    probs = kernels.softmax_rows(np.ascontiguousarray(scores.reshape(-1, tk))).reshape(
        b, h, tq, tk
    )
    ctx = _merge_heads(probs @ vh)
    out = ctx @ p[prefix + ".Wo"] + p[prefix + ".bo"]
    cache = (xq, xkv, qh, kh, vh, probs, ctx, scale)
    return out, cache


def mha_bwd(dout, cache, p, prefix, heads, grads):
    xq, xkv, qh, kh, vh, probs, ctx, scale = cache
    d2 = dout.reshape(-1, dout.shape[-1])
    grads[prefix + ".Wo"] += ctx.reshape(-1, ctx.shape[-1]).T @ d2
    grads[prefix + ".bo"] += d2.sum(axis=0)
    dctx = _split_heads(dout @ p[prefix + ".Wo"].T, heads)
    dprobs = dctx @ vh.swapaxes(-1, -2)
    dvh = probs.swapaxes(-1, -2) @ dctx
    b, h, tq, tk = probs.shape
    dscores = kernels.softmax_rows_grad(
        np.ascontiguousarray(probs.reshape(-1, tk)),
        np.ascontiguousarray(dprobs.reshape(-1, tk)),
    ).reshape(b, h, tq, tk)
    dqh = (dscores @ kh) * scale
    dkh = (dscores.swapaxes(-1, -2) @ qh) * scale
    dq = _merge_heads(dqh)
    dk = _merge_heads(dkh)
    dv = _merge_heads(dvh)
    xq2 = xq.reshape(-1, xq.shape[-1])
    xkv2 = xkv.reshape(-1, xkv.shape[-1])
    grads[prefix + ".Wq"] += xq2.T @ dq.reshape(-1, dq.shape[-1])
    grads[prefix + ".bq"] += dq.reshape(-1, dq.shape[-1]).sum(axis=0)
    grads[prefix + ".Wk"] += xkv2.T @ dk.reshape(-1, dk.shape[-1])
    grads[prefix + ".bk"] += dk.reshape(-1, dk.shape[-1]).sum(axis=0)
    grads[prefix + ".Wv"] += xkv2.T @ dv.reshape(-1, dv.shape[-1])
    grads[prefix + ".bv"] += dv.reshape(-1, dv.shape[-1]).sum(axis=0)
    dxq = dq @ p[prefix + ".Wq"].T
    dxkv = dk @ p[prefix + ".Wk"].T + dv @ p[prefix + ".Wv"].T
    return dxq, dxkv


def init_mha(rng, d_model, d_kv, dtype, out_scale=None):
    names = {}
    names["Wq"], names["bq"] = init_linear(rng, d_model, d_model, dtype)
    names["Wk"], names["bk"] = init_linear(rng, d_kv, d_model, dtype)
    names["Wv"], names["bv"] = init_linear(rng, d_kv, d_model, dtype)
    names["Wo"], names["bo"] = init_linear(rng, d_model, d_model, dtype, scale=out_scale)
    return names


def sinusoid_features(pos, dim, base=10000.0, scale=1.0):
    """Classic sin/cos features of scalar positions; ``pos`` any shape."""
    pos = np.asarray(pos, dtype=np.float64) * scale
    half = dim // 2
    freqs = np.exp(-np.log(base) * np.arange(half) / max(half - 1, 1))
    ang = pos[..., None] * freqs
    out = np.concatenate([np.sin(ang), np.cos(ang)], axis=-1)
    if out.shape[-1] < dim:
        out = np.concatenate([out, np.zeros(out.shape[:-1] + (dim - out.shape[-1],))], axis=-1)
    return out
