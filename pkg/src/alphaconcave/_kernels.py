"""Compiled inner loops: linear-time 1-D conjugate and the O(N^2) pair scan."""

import numba
import numpy as np


@numba.njit(cache=True)
def _conjugate_line(x, v, p, out, hx, hv):
    # lower hull of the finite points (x_i, v_i); x is increasing
    k = 0
    for i in range(x.shape[0]):
        vi = v[i]
        if vi == np.inf:
            continue
        while k >= 2 and (hv[k - 1] - hv[k - 2]) * (x[i] - hx[k - 1]) >= (vi - hv[k - 1]) * (hx[k - 1] - hx[k - 2]):
            k -= 1
        hx[k] = x[i]
        hv[k] = vi
        k += 1
    if k == 0:
        for m in range(p.shape[0]):
            out[m] = -np.inf
        return
    # p is increasing, so the maximising hull vertex only moves right
    j = 0
    for m in range(p.shape[0]):
        pm = p[m]
        while j < k - 1 and hv[j + 1] - hv[j] <= pm * (hx[j + 1] - hx[j]):
            j += 1
        out[m] = pm * hx[j] - hv[j]


@numba.njit(cache=True)
def conjugate_lines(x, V, p):
    """Row-wise discrete conjugate ``max_i p_m x_i - V[l, i]`` (``+inf`` entries skipped)."""
    L, N = V.shape
    out = np.empty((L, p.shape[0]))
    hx = np.empty(N)
    hv = np.empty(N)
    for l in range(L):
        _conjugate_line(x, V[l], p, out[l], hx, hv)
    return out


@numba.njit(cache=True)
def pair_min_scan(X0, w0, X1, w1, lo, h, counts, out):
    """``out[z] = min (w0[i] + w1[j]) / 2`` over pairs whose half-sum snaps to node z.

    A pair snaps to z when ``|x_i + y_j - 2 z| <= h / 2`` on every axis.
    """
    n = lo.shape[0]
    strides = np.ones(n, dtype=np.int64)
    for a in range(n - 2, -1, -1):
        strides[a] = strides[a + 1] * counts[a + 1]
    for i in range(X0.shape[0]):
        for j in range(X1.shape[0]):
            flat = 0
            ok = True
            for a in range(n):
                s = X0[i, a] + X1[j, a]
                r = np.rint((0.5 * s - lo[a]) / h[a])
                if r < 0 or r >= counts[a]:
                    ok = False
                    break
                if abs(s - 2.0 * (lo[a] + r * h[a])) > 0.5 * h[a] * (1.0 + 1e-9):
                    ok = False
                    break
                flat += np.int64(r) * strides[a]
            if ok:
                val = 0.5 * (w0[i] + w1[j])
                if val < out[flat]:
                    out[flat] = val


@numba.njit(cache=True)
def star_values(f):
    """``out[k] = max_i min(f[i], f[i - k])`` for ``k = 0 .. N-1``."""
    n = f.shape[0]
    out = np.zeros(n)
    for k in range(n):
        best = 0.0
        for i in range(k, n):
            a = f[i]
            b = f[i - k]
            m = a if a < b else b
            if m > best:
                best = m
        out[k] = best
    return out


@numba.njit(cache=True)
def _mean_half(a, b, regime, alpha):
    # equal-weight mean of order alpha; regime 0: alpha = 0, 1: finite, 2: -inf
    if regime == 2:
        return a if a < b else b
    if a == 0.0 or b == 0.0:
        return 0.0
    if a == np.inf or b == np.inf:
        if regime == 0 or (a == np.inf and b == np.inf):
            return np.inf
        c = b if a == np.inf else a
        return c * 2.0 ** (-1.0 / alpha)
    if regime == 0:
        return np.sqrt(a) * np.sqrt(b)
    la = alpha * np.log(a)
    lb = alpha * np.log(b)
    hi = la if la > lb else lb
    lo = lb if la > lb else la
    s = hi + np.log1p(np.exp(lo - hi)) - np.log(2.0)
    return np.exp(s / alpha)


@numba.njit(cache=True)
def difference_sup(f, regime, alpha, half):
    """``out[k] = max_x M(f[x], f[x - 2k])`` on the aligned lattice ``|k_a| <= half[a]``.

    ``f`` is 3-D (pad lower dimensions with length-1 axes).
    """
    n0, n1, n2 = f.shape
    K0, K1, K2 = half[0], half[1], half[2]
    out = np.zeros((2 * K0 + 1, 2 * K1 + 1, 2 * K2 + 1))
    for k0 in range(-K0, K0 + 1):
        for k1 in range(-K1, K1 + 1):
            for k2 in range(-K2, K2 + 1):
                best = 0.0
                for i0 in range(max(0, 2 * k0), min(n0, n0 + 2 * k0)):
                    j0 = i0 - 2 * k0
                    for i1 in range(max(0, 2 * k1), min(n1, n1 + 2 * k1)):
                        j1 = i1 - 2 * k1
                        for i2 in range(max(0, 2 * k2), min(n2, n2 + 2 * k2)):
                            m = _mean_half(f[i0, i1, i2], f[j0, j1, i2 - 2 * k2], regime, alpha)
                            if m > best:
                                best = m
                out[k0 + K0, k1 + K1, k2 + K2] = best
    return out
