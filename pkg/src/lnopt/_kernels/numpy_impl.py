"""Pure-numpy kernel implementations (fallback backend)."""

import numpy as np

_TWO_PI = 2.0 * np.pi


def onemax_loss(x):
    return float(x.size - x.sum())


def leadingones_loss(x):
    zeros = np.flatnonzero(x != 1.0)
    prefix = x.size if zeros.size == 0 else int(zeros[0])
    return float(x.size - prefix)


def ising_ring_loss(x):
    return float(np.count_nonzero(x != np.roll(x, -1)))


def sphere_loss(z):
    return float(z @ z)


def illcond_loss(z):
    norm = float(np.sqrt(z @ z))
    tail = float(z[2:] @ z[2:]) if z.size > 2 else 0.0
    return float(z[0] * z[0] + z[1] * z[1] / (norm + 1e-9) + tail)


def multimodal_loss(z):
    r = float(np.sqrt(z @ z))
    return r * (2.0 + np.sin(1.0 / max(r, 1e-12)))


def path_loss(z):
    r = float(np.hypot(z[0], z[1]))
    rg = max(r, 1e-12)
    theta = float(np.arctan2(z[1], z[0]))
    delta = theta - 10.0 * np.log(rg)
    wrapped = (delta + np.pi) % _TWO_PI - np.pi
    dev = min(abs(wrapped), np.pi)
    tail = float(z[2:] @ z[2:]) if z.size > 2 else 0.0
    return float(r * (1.0 + dev / (np.pi * rg)) + tail)


def clamp_add(image, pert):
    return np.clip(image + pert, 0.0, 1.0)


def gray_pool(img, ph, pw):
    """Grayscale (channel mean) then average-pool onto a ph x pw grid."""
    h, w, _ = img.shape
    g = img.mean(axis=2)
    bi = (np.arange(h) * ph) // h
    bj = (np.arange(w) * pw) // w
    idx = (bi[:, None] * pw + bj[None, :]).ravel()
    sums = np.bincount(idx, weights=g.ravel(), minlength=ph * pw)
    counts = np.bincount(idx, minlength=ph * pw)
    return sums / counts


# Neighborhood means use the deviation-from-center form so that constant
# inputs are reproduced bit-exactly (sum of zero deviations stays 0.0).

def neighborhood_mean_1d(x):
    n = x.size
    dev = np.zeros(n)
    cnt = np.ones(n)
    dev[:-1] += x[1:] - x[:-1]
    cnt[:-1] += 1.0
    dev[1:] += x[:-1] - x[1:]
    cnt[1:] += 1.0
    return x + dev / cnt


def neighborhood_mean_2d(x):
    h, w = x.shape
    dev = np.zeros((h, w))
    cnt = np.ones((h, w))
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            ts, te = max(di, 0), h + min(di, 0)
            ls, le = max(dj, 0), w + min(dj, 0)
            dst = (slice(ts - di, te - di), slice(ls - dj, le - dj))
            src = (slice(ts, te), slice(ls, le))
            dev[dst] += x[src] - x[dst]
            cnt[dst] += 1.0
    return x + dev / cnt
