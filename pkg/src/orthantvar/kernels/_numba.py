"""numba-compiled kernels; same signatures as ``_numpy``."""
import math

import numpy as np
from numba import njit

from .codes import CLAYTON, FRANK, GUMBEL, INDEPENDENCE, ONE_MINUS, TINY

_jit = njit(cache=True, nogil=True)


@_jit
def _phi(code, theta, t):
    if t <= 0.0:
        if code == CLAYTON and theta < 0.0:
            return -1.0 / theta
        return np.inf
    if code == INDEPENDENCE:
        return -math.log(t)
    if code == CLAYTON:
        return math.expm1(-theta * math.log(t)) / theta
    if code == GUMBEL:
        return max(-math.log(t), 0.0) ** theta
    if code == FRANK:
        if t > 0.5:
            return -math.log1p(math.exp(-theta) * math.expm1(theta * (1.0 - t)) / math.expm1(-theta))
        return -math.log(math.expm1(-theta * t) / math.expm1(-theta))
    return math.log1p(-theta * (1.0 - t)) - math.log(t)


@_jit
def _psi(code, theta, s):
    if not math.isfinite(s):
        return 0.0
    if code == INDEPENDENCE:
        return math.exp(-s)
    if code == CLAYTON:
        if 1.0 + theta * s <= 0.0:
            return 0.0
        return math.exp(-math.log1p(theta * s) / theta)
    if code == GUMBEL:
        return math.exp(-(s ** (1.0 / theta)))
    if code == FRANK:
        return -math.log1p(math.exp(-s) * math.expm1(-theta)) / theta
    y = math.exp(-s)
    return (1.0 - theta) * y / (1.0 - theta * y)


@_jit
def _generator_flat(code, theta, t):
    out = np.empty_like(t)
    for i in range(t.shape[0]):
        out[i] = _phi(code, theta, t[i])
    return out


@_jit
def _generator_inverse_flat(code, theta, s):
    out = np.empty_like(s)
    for i in range(s.shape[0]):
        out[i] = _psi(code, theta, s[i])
    return out


def generator(code, theta, t):
    t = np.ascontiguousarray(t, dtype=np.float64)
    return _generator_flat(code, float(theta), t.ravel()).reshape(t.shape)


def generator_inverse(code, theta, s):
    s = np.ascontiguousarray(s, dtype=np.float64)
    return _generator_inverse_flat(code, float(theta), s.ravel()).reshape(s.shape)


@_jit
def _archimedean_cdf(code, theta, u):
    n, d = u.shape
    out = np.empty(n)
    for i in range(n):
        if code == INDEPENDENCE:
            acc = 1.0
            for j in range(d):
                acc *= u[i, j]
            out[i] = acc
        else:
            acc = 0.0
            for j in range(d):
                acc += _phi(code, theta, u[i, j])
            out[i] = _psi(code, theta, acc)
    return out


def archimedean_cdf(code, theta, u):
    return _archimedean_cdf(code, float(theta), np.ascontiguousarray(u, dtype=np.float64))


@_jit
def _radial_transform(code, theta, e, r):
    n, d = e.shape
    out = np.empty((n, d))
    for i in range(n):
        tot = 0.0
        for j in range(d):
            tot += e[i, j]
        for j in range(d):
            v = _psi(code, theta, e[i, j] / tot * r[i])
            out[i, j] = min(max(v, TINY), ONE_MINUS)
    return out


def radial_transform(code, theta, e, r):
    return _radial_transform(
        code, float(theta), np.ascontiguousarray(e, dtype=np.float64),
        np.ascontiguousarray(r, dtype=np.float64),
    )


@_jit
def _band_stats(x, score, ref, lo, hi, left_closed):
    n, d = x.shape
    nb = lo.shape[0]
    counts = np.zeros(nb, dtype=np.int64)
    sums = np.zeros((nb, d))
    sumsq = np.zeros((nb, d))
    floor = lo.min()
    ceil = hi.max()
    dx = np.empty(d)
    # one pass over the rows; most scores miss every band and leave after two comparisons
    for i in range(n):
        c = score[i]
        if c < floor or c > ceil:
            continue
        have_dx = False
        for b in range(nb):
            if left_closed:
                inside = c >= lo[b] and c < hi[b]
            else:
                inside = c > lo[b] and c <= hi[b]
            if inside:
                if not have_dx:
                    for j in range(d):
                        dx[j] = x[i, j] - ref[j]
                    have_dx = True
                counts[b] += 1
                for j in range(d):
                    sums[b, j] += dx[j]
                    sumsq[b, j] += dx[j] * dx[j]
    return counts, sums, sumsq


def band_stats(x, score, ref, lo, hi, left_closed):
    return _band_stats(
        np.ascontiguousarray(x, dtype=np.float64),
        np.ascontiguousarray(score, dtype=np.float64),
        np.ascontiguousarray(ref, dtype=np.float64),
        np.ascontiguousarray(lo, dtype=np.float64),
        np.ascontiguousarray(hi, dtype=np.float64),
        bool(left_closed),
    )
