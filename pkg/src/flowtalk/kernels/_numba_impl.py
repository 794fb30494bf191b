"""Numba-compiled implementations of the hot kernels."""

from __future__ import annotations

import math

import numpy as np
from numba import njit


@njit(cache=True)
def _softmax_rows(x, out):
    rows, cols = x.shape
    for i in range(rows):
        m = x[i, 0]
        for j in range(1, cols):
            if x[i, j] > m:
                m = x[i, j]
        s = 0.0
        for j in range(cols):
            v = math.exp(x[i, j] - m)
            out[i, j] = v
            s += v
        inv = 1.0 / s
        for j in range(cols):
            out[i, j] *= inv


def softmax_rows(x):
    out = np.empty_like(x)
    _softmax_rows(x, out)
    return out


@njit(cache=True)
def _softmax_rows_grad(p, dp, out):
    rows, cols = p.shape
    for i in range(rows):
        inner = 0.0
        for j in range(cols):
            inner += dp[i, j] * p[i, j]
        for j in range(cols):
            out[i, j] = p[i, j] * (dp[i, j] - inner)


def softmax_rows_grad(p, dp):
    out = np.empty_like(p)
    _softmax_rows_grad(p, dp, out)
    return out


@njit(cache=True)
def _gauss_splat(img, xs, ys, amps, sigma):
    h, w = img.shape
    n = xs.shape[0]
    if sigma <= 0.0:
        for k in range(n):
            c = int(round(xs[k]))
            r = int(round(ys[k]))
            if 0 <= r < h and 0 <= c < w:
                img[r, c] += amps[k]
        return
    cut = 4.0 * sigma
    cut2 = cut * cut
    inv = 1.0 / (2.0 * sigma * sigma)
    for k in range(n):
        x = xs[k]
        y = ys[k]
        a = amps[k]
        r0 = max(0, int(math.floor(y - cut)))
        r1 = min(h - 1, int(math.ceil(y + cut)))
        c0 = max(0, int(math.floor(x - cut)))
        c1 = min(w - 1, int(math.ceil(x + cut)))
        for r in range(r0, r1 + 1):
            dy = r - y
            for c in range(c0, c1 + 1):
                dx = c - x
                d2 = dx * dx + dy * dy
                if d2 <= cut2:
                    img[r, c] += a * math.exp(-d2 * inv)


def gauss_splat(img, xs, ys, amps, sigma):
    xs = np.ascontiguousarray(xs, dtype=img.dtype)
    ys = np.ascontiguousarray(ys, dtype=img.dtype)
    amps = np.ascontiguousarray(amps, dtype=img.dtype)
    _gauss_splat(img, xs, ys, amps, sigma)
