"""Shared spectral helpers on the unit torus [0,1)^2.

Real fields are stored either on an n-by-n collocation grid or as rfft2
coefficients (shape (n, n//2+1), numpy normalization).  All wavenumbers
are integer mode indices; physical wavevectors carry the 2*pi factor.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import fft as sfft

_WORKERS = 2


def set_fft_workers(n: int) -> None:
    global _WORKERS
    _WORKERS = max(1, int(n))


def rfft2(a: np.ndarray) -> np.ndarray:
    return sfft.rfft2(a, workers=_WORKERS)


def irfft2(a: np.ndarray, n: int) -> np.ndarray:
    return sfft.irfft2(a, s=(n, n), workers=_WORKERS)


@dataclass(frozen=True)
class Grid2D:
    """Collocation grid and spectral bookkeeping for one resolution."""

    n: int

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.n) / self.n

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        # indexing 'ij': axis 0 is x1, axis 1 is x2
        return np.meshgrid(self.x, self.x, indexing="ij")

    @property
    def k1(self) -> np.ndarray:
        """Integer mode numbers along axis 0, shaped (n, 1)."""
        return sfft.fftfreq(self.n, d=1.0 / self.n).reshape(-1, 1)

    @property
    def k2(self) -> np.ndarray:
        """Integer mode numbers along axis 1 (rfft half-spectrum), shaped (1, n//2+1)."""
        return np.arange(self.n // 2 + 1).reshape(1, -1)

    @property
    def ksq(self) -> np.ndarray:
        return self.k1**2 + self.k2**2

    def dealias_mask(self) -> np.ndarray:
        """Two-thirds rule: keep |k_i| <= n//3 on both axes."""
        kc = self.n // 3
        return (np.abs(self.k1) <= kc) & (np.abs(self.k2) <= kc)

    def grad_coeffs(self, fh: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        two_pi_i = 2j * np.pi
        return two_pi_i * self.k1 * fh, two_pi_i * self.k2 * fh

    def laplacian_coeffs(self, fh: np.ndarray) -> np.ndarray:
        return -4.0 * np.pi**2 * self.ksq * fh


@lru_cache(maxsize=16)
def grid(n: int) -> Grid2D:
    return Grid2D(n)


def rfft2_weights(n: int) -> np.ndarray:
    """Parseval weights for rfft2 coefficients: 1 for k2 in {0, n/2}, else 2."""
    w = np.full(n // 2 + 1, 2.0)
    w[0] = 1.0
    if n % 2 == 0:
        w[-1] = 1.0
    return w.reshape(1, -1)


def l2sq_from_coeffs(fh: np.ndarray, n: int) -> float:
    """Mean-square over the torus, <f^2>, from rfft2 coefficients."""
    w = rfft2_weights(n)
    return float(np.sum(w * np.abs(fh) ** 2)) / n**4


def gradsq_from_coeffs(fh: np.ndarray, n: int) -> float:
    """<|grad f|^2> from rfft2 coefficients."""
    g = grid(n)
    w = rfft2_weights(n)
    return float(4.0 * np.pi**2 * np.sum(w * g.ksq * np.abs(fh) ** 2)) / n**4


def hminus1sq_from_coeffs(fh: np.ndarray, n: int) -> float:
    """<|(-Delta)^{-1/2} f|^2> for mean-zero f, from rfft2 coefficients."""
    g = grid(n)
    w = rfft2_weights(n)
    ksq = g.ksq.astype(float).copy()
    ksq[0, 0] = np.inf
    return float(np.sum(w * np.abs(fh) ** 2 / (4.0 * np.pi**2 * ksq))) / n**4
