"""Vectorised numpy implementations of the hot kernels.

Every function here has a twin with the same signature in ``_numba``; the
two must agree to rounding error (see tests/test_kernels.py).
"""
import numpy as np

from .codes import AMH, CLAYTON, FRANK, GUMBEL, INDEPENDENCE, ONE_MINUS, TINY


def generator(code, theta, t):
    t = np.asarray(t, dtype=np.float64)
    out = np.empty_like(t)
    pos = t > 0.0
    tp = np.where(pos, t, 1.0)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        if code == INDEPENDENCE:
            val = -np.log(tp)
        elif code == CLAYTON:
            val = np.expm1(-theta * np.log(tp)) / theta
        elif code == GUMBEL:
            val = np.maximum(-np.log(tp), 0.0) ** theta
        elif code == FRANK:
            far = -np.log(np.expm1(-theta * tp) / np.expm1(-theta))
            near = -np.log1p(np.exp(-theta) * np.expm1(theta * (1.0 - tp)) / np.expm1(-theta))
            val = np.where(tp > 0.5, near, far)
        elif code == AMH:
            val = np.log1p(-theta * (1.0 - tp)) - np.log(tp)
        else:
            raise ValueError(f"unknown family code {code}")
    at_zero = -1.0 / theta if (code == CLAYTON and theta < 0.0) else np.inf
    out[...] = np.where(pos, val, at_zero)
    return out


def generator_inverse(code, theta, s):
    s = np.asarray(s, dtype=np.float64)
    fin = np.isfinite(s)
    sf = np.where(fin, s, 0.0)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore", under="ignore"):
        if code == INDEPENDENCE:
            val = np.exp(-sf)
        elif code == CLAYTON:
            base = 1.0 + theta * sf
            val = np.where(base > 0.0, np.exp(-np.log1p(theta * sf) / theta), 0.0)
        elif code == GUMBEL:
            val = np.exp(-(sf ** (1.0 / theta)))
        elif code == FRANK:
            val = -np.log1p(np.exp(-sf) * np.expm1(-theta)) / theta
        elif code == AMH:
            y = np.exp(-sf)
            val = (1.0 - theta) * y / (1.0 - theta * y)
        else:
            raise ValueError(f"unknown family code {code}")
    return np.where(fin, val, 0.0)


def archimedean_cdf(code, theta, u):
    u = np.asarray(u, dtype=np.float64)
    if code == INDEPENDENCE:
        return np.prod(u, axis=1)
    return generator_inverse(code, theta, generator(code, theta, u).sum(axis=1))


def radial_transform(code, theta, e, r):
    w = e / e.sum(axis=1, keepdims=True)
    u = generator_inverse(code, theta, w * r[:, None])
    return np.clip(u, TINY, ONE_MINUS)


def band_stats(x, score, ref, lo, hi, left_closed):
    nb = lo.shape[0]
    d = x.shape[1]
    counts = np.zeros(nb, dtype=np.int64)
    sums = np.zeros((nb, d))
    sumsq = np.zeros((nb, d))
    dx = x - ref[None, :]
    for b in range(nb):
        if left_closed:
            mask = (score >= lo[b]) & (score < hi[b])
        else:
            mask = (score > lo[b]) & (score <= hi[b])
        sel = dx[mask]
        counts[b] = sel.shape[0]
        sums[b] = sel.sum(axis=0)
        sumsq[b] = (sel * sel).sum(axis=0)
    return counts, sums, sumsq
