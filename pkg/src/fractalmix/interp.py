"""Periodic cubic interpolation of gridded fields on the unit torus.

Catmull-Rom tensor-product interpolation, vectorized over query points.
Fields are sampled on a uniform n-by-n grid over [0,1)^2 (axis 0 = x1).
A numba kernel is used when available; the numpy fallback is identical.
"""
from __future__ import annotations

import numpy as np

try:  # pragma: no cover - environment dependent
    import numba

    HAVE_NUMBA = True
except Exception:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False


def _weights(f: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    # Catmull-Rom weights for the four taps at offsets -1, 0, 1, 2
    f2 = f * f
    f3 = f2 * f
    w0 = 0.5 * (-f3 + 2.0 * f2 - f)
    w1 = 0.5 * (3.0 * f3 - 5.0 * f2 + 2.0)
    w2 = 0.5 * (-3.0 * f3 + 4.0 * f2 + f)
    w3 = 0.5 * (f3 - f2)
    return w0, w1, w2, w3


def bicubic_periodic(fields: np.ndarray, x1: np.ndarray, x2: np.ndarray) -> np.ndarray:
    """Interpolate a stack of periodic fields at scattered points.

    fields: (c, n, n) array sampled at grid points (i/n, j/n).
    x1, x2: arrays of query coordinates (any shape), periodized internally.
    Returns (c,) + x1.shape.
    """
    fields = np.ascontiguousarray(fields)
    c, n, _ = fields.shape
    shape = x1.shape
    x1 = np.ravel(x1) * n
    x2 = np.ravel(x2) * n
    i0 = np.floor(x1).astype(np.int64)
    j0 = np.floor(x2).astype(np.int64)
    f1 = x1 - i0
    f2 = x2 - j0
    if HAVE_NUMBA:
        out = _bicubic_nb(fields, i0, j0, f1, f2)
    else:
        out = _bicubic_np(fields, i0, j0, f1, f2)
    return out.reshape((c,) + shape)


def _bicubic_np(fields, i0, j0, f1, f2):
    c, n, _ = fields.shape
    w1s = _weights(f1)
    w2s = _weights(f2)
    out = np.zeros((c, i0.size))
    rows = [(i0 + di) % n for di in (-1, 0, 1, 2)]
    cols = [(j0 + dj) % n for dj in (-1, 0, 1, 2)]
    for a in range(4):
        row_acc = np.zeros((c, i0.size))
        for b in range(4):
            row_acc += w2s[b] * fields[:, rows[a], cols[b]]
        out += w1s[a] * row_acc
    return out


if HAVE_NUMBA:

    @numba.njit(cache=True, parallel=True, fastmath=True)
    def _bicubic_nb(fields, i0, j0, f1, f2):  # pragma: no cover - jit
        c, n, _ = fields.shape
        npts = i0.size
        out = np.zeros((c, npts))
        for p in numba.prange(npts):
            u = f1[p]
            v = f2[p]
            u2 = u * u
            u3 = u2 * u
            v2 = v * v
            v3 = v2 * v
            wu0 = 0.5 * (-u3 + 2.0 * u2 - u)
            wu1 = 0.5 * (3.0 * u3 - 5.0 * u2 + 2.0)
            wu2 = 0.5 * (-3.0 * u3 + 4.0 * u2 + u)
            wu3 = 0.5 * (u3 - u2)
            wv0 = 0.5 * (-v3 + 2.0 * v2 - v)
            wv1 = 0.5 * (3.0 * v3 - 5.0 * v2 + 2.0)
            wv2 = 0.5 * (-3.0 * v3 + 4.0 * v2 + v)
            wv3 = 0.5 * (v3 - v2)
            i = i0[p]
            j = j0[p]
            im = (i - 1) % n
            i1 = i % n
            ip = (i + 1) % n
            ipp = (i + 2) % n
            jm = (j - 1) % n
            j1 = j % n
            jp = (j + 1) % n
            jpp = (j + 2) % n
            for q in range(c):
                r0 = wv0 * fields[q, im, jm] + wv1 * fields[q, im, j1] + \
                    wv2 * fields[q, im, jp] + wv3 * fields[q, im, jpp]
                r1 = wv0 * fields[q, i1, jm] + wv1 * fields[q, i1, j1] + \
                    wv2 * fields[q, i1, jp] + wv3 * fields[q, i1, jpp]
                r2 = wv0 * fields[q, ip, jm] + wv1 * fields[q, ip, j1] + \
                    wv2 * fields[q, ip, jp] + wv3 * fields[q, ip, jpp]
                r3 = wv0 * fields[q, ipp, jm] + wv1 * fields[q, ipp, j1] + \
                    wv2 * fields[q, ipp, jp] + wv3 * fields[q, ipp, jpp]
                out[q, p] = wu0 * r0 + wu1 * r1 + wu2 * r2 + wu3 * r3
        return out


def cubic_time_weights(s: float) -> tuple[np.ndarray, int]:
    """Catmull-Rom weights in time: s in [0,1] between nodes i and i+1.

    Returns (weights for nodes i-1, i, i+1, i+2, base offset -1).
    """
    w = np.empty(4)
    s2 = s * s
    s3 = s2 * s
    w[0] = 0.5 * (-s3 + 2.0 * s2 - s)
    w[1] = 0.5 * (3.0 * s3 - 5.0 * s2 + 2.0)
    w[2] = 0.5 * (-3.0 * s3 + 4.0 * s2 + s)
    w[3] = 0.5 * (s3 - s2)
    return w, -1
