"""Slow reference computations used only by tests.

Nothing here calls into the package's convolution code.
"""

import numpy as np


def reflect_index(i, n):
    """Whole-sample symmetric reflection of index ``i`` into ``0..n-1``."""
    if i < 0:
        i = -i
    if i > n - 1:
        i = 2 * (n - 1) - i
    assert 0 <= i < n, "reflection ran off the far edge"
    return i


def dense_kernel(j):
    """Level-j kernel built straight from the taps, without the package."""
    step = 2 ** (j - 1)
    v = np.zeros(4 * step + 1)
    for k, t in enumerate([1, 4, 6, 4, 1]):
        v[k * step] = t / 16
    return np.outer(v, v)


def dense_smooth(img, j):
    """Brute-force 2D convolution with mirror boundary, one output pixel at a time."""
    img = np.asarray(img, dtype=float)
    h, w = img.shape
    k = dense_kernel(j)
    half = k.shape[0] // 2
    out = np.zeros_like(img)
    for y in range(h):
        for x in range(w):
            acc = 0.0
            for dy in range(-half, half + 1):
                yy = reflect_index(y + dy, h)
                for dx in range(-half, half + 1):
                    wgt = k[dy + half, dx + half]
                    if wgt:
                        acc += wgt * img[yy, reflect_index(x + dx, w)]
            out[y, x] = acc
    return out


def tally(pred, gt):
    """Per-pixel confusion tally in plain Python."""
    tp = fp = fn = tn = 0
    for p, g in zip(np.ravel(pred).tolist(), np.ravel(gt).tolist()):
        if p and g:
            tp += 1
        elif p:
            fp += 1
        elif g:
            fn += 1
        else:
            tn += 1
    return tp, fp, fn, tn


def otsu_exhaustive(scores, nbins=256):
    """Try every cut of the normalized histogram; return the foreground mask.

    Between-class variance is computed in floating point from class weights
    and means over the raw bin indices.
    """
    s = np.asarray(scores, dtype=float)
    lo, hi = s.min(), s.max()
    if hi == lo:
        return np.zeros(s.shape, bool)
    bins = np.minimum(((s - lo) / (hi - lo) * nbins).astype(int), nbins - 1)
    best, best_k = -1.0, None
    for k in range(nbins - 1):
        a, b = bins[bins <= k], bins[bins > k]
        if a.size == 0 or b.size == 0:
            continue
        var = a.size * b.size * (a.mean() - b.mean()) ** 2 / s.size ** 2
        if var > best * (1 + 1e-12):
            best, best_k = var, k
    return bins > best_k
