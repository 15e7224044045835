"""Truncated Taylor-series (jet) arithmetic.

A jet of order p at a batch of points is an array of shape (p+1, ...)
holding Taylor coefficients c_j so that f(x + h) = sum_j c_j h^j + O(h^{p+1}).
Derivatives follow as f^{(j)} = j! * c_j.  Used to evaluate exact
derivatives of the smooth cutoff profiles up to the configured cap;
everything is vectorized over the trailing axes.
"""
from __future__ import annotations

import math

import numpy as np


def jet_var(x: np.ndarray, order: int, scale: float = 1.0) -> np.ndarray:
    """Jet of the affine map h -> x + scale*h."""
    x = np.asarray(x, dtype=float)
    out = np.zeros((order + 1,) + x.shape)
    out[0] = x
    if order >= 1:
        out[1] = scale
    return out


def jet_const(c, order: int, shape: tuple) -> np.ndarray:
    out = np.zeros((order + 1,) + shape)
    out[0] = c
    return out


def jet_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    p = a.shape[0] - 1
    out = np.zeros_like(a)
    for j in range(p + 1):
        for i in range(j + 1):
            out[j] += a[i] * b[j - i]
    return out


def jet_recip(a: np.ndarray) -> np.ndarray:
    """Jet of 1/a; a[0] must be nonzero everywhere."""
    p = a.shape[0] - 1
    out = np.zeros_like(a)
    out[0] = 1.0 / a[0]
    for j in range(1, p + 1):
        acc = np.zeros_like(a[0])
        for i in range(1, j + 1):
            acc += a[i] * out[j - i]
        out[j] = -acc / a[0]
    return out


def jet_div(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return jet_mul(a, jet_recip(b))


def jet_exp(a: np.ndarray) -> np.ndarray:
    """Jet of exp(a), using the standard recurrence e' = e * a'."""
    p = a.shape[0] - 1
    out = np.zeros_like(a)
    out[0] = np.exp(a[0])
    for j in range(1, p + 1):
        acc = np.zeros_like(a[0])
        for i in range(1, j + 1):
            acc += i * a[i] * out[j - i]
        out[j] = acc / j
    return out


def jet_derivatives(jet: np.ndarray) -> np.ndarray:
    """Convert Taylor coefficients to derivative values (j! * c_j)."""
    p = jet.shape[0] - 1
    fact = np.array([math.factorial(j) for j in range(p + 1)], dtype=float)
    return jet * fact.reshape((p + 1,) + (1,) * (jet.ndim - 1))
