"""Pure-numpy fallback implementations of the hot kernels."""

from __future__ import annotations

import numpy as np


def softmax_rows(x):
    m = x.max(axis=1, keepdims=True)
    e = np.exp(x - m)
    return e / e.sum(axis=1, keepdims=True)


def softmax_rows_grad(p, dp):
    inner = (dp * p).sum(axis=1, keepdims=True)
    return p * (dp - inner)


def gauss_splat(img, xs, ys, amps, sigma):
    h, w = img.shape
    if sigma <= 0.0:
        for x, y, a in zip(xs, ys, amps):
            c = int(round(float(x)))
            r = int(round(float(y)))
            if 0 <= r < h and 0 <= c < w:
                img[r, c] += a
        return
    cut = 4.0 * sigma
    inv = 1.0 / (2.0 * sigma * sigma)
    for x, y, a in zip(xs, ys, amps):
        r0 = max(0, int(np.floor(y - cut)))
        r1 = min(h - 1, int(np.ceil(y + cut)))
        c0 = max(0, int(np.floor(x - cut)))
        c1 = min(w - 1, int(np.ceil(x + cut)))
        if r1 < r0 or c1 < c0:
            continue
        rr = np.arange(r0, r1 + 1, dtype=img.dtype)[:, None] - y
        cc = np.arange(c0, c1 + 1, dtype=img.dtype)[None, :] - x
        d2 = rr * rr + cc * cc
        patch = a * np.exp(-d2 * inv)
        patch[d2 > cut * cut] = 0.0
        img[r0 : r1 + 1, c0 : c1 + 1] += patch
