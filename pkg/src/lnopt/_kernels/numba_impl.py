"""Numba @njit kernel implementations (default backend)."""

import math

import numpy as np
from numba import njit

_TWO_PI = 2.0 * math.pi


@njit(cache=True)
def onemax_loss(x):
    s = 0.0
    for i in range(x.size):
        s += x[i]
    return x.size - s


@njit(cache=True)
def leadingones_loss(x):
    prefix = 0
    for i in range(x.size):
        if x[i] != 1.0:
            break
        prefix += 1
    return float(x.size - prefix)


@njit(cache=True)
def ising_ring_loss(x):
    n = x.size
    bad = 0
    for i in range(n):
        if x[i] != x[(i + 1) % n]:
            bad += 1
    return float(bad)


@njit(cache=True)
def sphere_loss(z):
    s = 0.0
    for i in range(z.size):
        s += z[i] * z[i]
    return s


@njit(cache=True)
def illcond_loss(z):
    sq = 0.0
    for i in range(z.size):
        sq += z[i] * z[i]
    norm = math.sqrt(sq)
    tail = 0.0
    for i in range(2, z.size):
        tail += z[i] * z[i]
    return z[0] * z[0] + z[1] * z[1] / (norm + 1e-9) + tail


@njit(cache=True)
def multimodal_loss(z):
    sq = 0.0
    for i in range(z.size):
        sq += z[i] * z[i]
    r = math.sqrt(sq)
    return r * (2.0 + math.sin(1.0 / max(r, 1e-12)))


@njit(cache=True)
def path_loss(z):
    r = math.hypot(z[0], z[1])
    rg = max(r, 1e-12)
    theta = math.atan2(z[1], z[0])
    delta = theta - 10.0 * math.log(rg)
    wrapped = (delta + math.pi) % _TWO_PI - math.pi
    dev = min(abs(wrapped), math.pi)
    tail = 0.0
    for i in range(2, z.size):
        tail += z[i] * z[i]
    return r * (1.0 + dev / (math.pi * rg)) + tail


@njit(cache=True)
def clamp_add(image, pert):
    h, w, c = image.shape
    out = np.empty((h, w, c))
    for i in range(h):
        for j in range(w):
            for k in range(c):
                v = image[i, j, k] + pert[i, j, k]
                if v < 0.0:
                    v = 0.0
                elif v > 1.0:
                    v = 1.0
                out[i, j, k] = v
    return out


@njit(cache=True)
def gray_pool(img, ph, pw):
    h, w, c = img.shape
    sums = np.zeros(ph * pw)
    counts = np.zeros(ph * pw)
    for i in range(h):
        bi = (i * ph) // h
        for j in range(w):
            bj = (j * pw) // w
            s = 0.0
            for k in range(c):
                s += img[i, j, k]
            idx = bi * pw + bj
            sums[idx] += s / c
            counts[idx] += 1.0
    return sums / counts


@njit(cache=True)
def neighborhood_mean_1d(x):
    n = x.size
    out = np.empty(n)
    for i in range(n):
        lo = max(i - 1, 0)
        hi = min(i + 1, n - 1)
        dev = 0.0
        for j in range(lo, hi + 1):
            dev += x[j] - x[i]
        out[i] = x[i] + dev / (hi - lo + 1)
    return out


@njit(cache=True)
def neighborhood_mean_2d(x):
    h, w = x.shape
    out = np.empty((h, w))
    for i in range(h):
        i0 = max(i - 1, 0)
        i1 = min(i + 1, h - 1)
        for j in range(w):
            j0 = max(j - 1, 0)
            j1 = min(j + 1, w - 1)
            dev = 0.0
            cnt = 0
            for a in range(i0, i1 + 1):
                for b in range(j0, j1 + 1):
                    dev += x[a, b] - x[i, j]
                    cnt += 1
            out[i, j] = x[i, j] + dev / cnt
    return out
