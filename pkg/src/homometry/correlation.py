"""Finite-volume autocorrelation coefficients.

All estimators divide the pair sum by the size of the averaging region (the
number of sites N, or pi R^2 for point sets), not by the number of
overlapping pairs.  This is the finite-R version of the volume-averaged
convolution and makes the lag sums exactly the Fourier coefficients of the
one-block periodogram.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .combs import LatticeConfig2D, PointSet2D, SequenceWindow
from .errors import InvalidInput


@dataclass(frozen=True, eq=False)
class AutocorrelationEstimate:
    """Lag-indexed coefficients eta(m).

    ``lags`` has shape (K,) in 1D and (K, 2) in 2D; ``coefficients[i]`` is
    the value at ``lags[i]``.  Lags are listed in increasing (lexicographic)
    order and always symmetric about zero.
    """

    lags: np.ndarray
    coefficients: np.ndarray
    window_size: int
    label: str = ""
    meta: dict = field(default_factory=dict)

    def at(self, lag) -> float:
        lag = np.asarray(lag)
        if self.lags.ndim == 1:
            i = np.searchsorted(self.lags, int(lag))
            if i < self.lags.size and self.lags[i] == lag:
                return float(self.coefficients[i])
        else:
            hit = np.nonzero(np.all(self.lags == lag, axis=1))[0]
            if hit.size:
                return float(self.coefficients[hit[0]])
        raise KeyError(f"lag {lag.tolist()} not estimated")

    @property
    def max_lag(self) -> int:
        return int(np.max(np.abs(self.lags)))

    def off_zero_max(self) -> float:
        """max |eta(m)| over m != 0."""
        nz = self.lags != 0 if self.lags.ndim == 1 else np.any(self.lags != 0, axis=1)
        return float(np.max(np.abs(self.coefficients[nz]))) if nz.any() else 0.0


def default_max_lag(n: int) -> int:
    return max(1, min(128, n // 64))


def autocorr_1d(w: SequenceWindow, max_lag: int | None = None) -> AutocorrelationEstimate:
    n = len(w)
    if max_lag is None:
        max_lag = default_max_lag(n)
    if max_lag < 0 or max_lag >= n:
        raise InvalidInput(f"max_lag must satisfy 0 <= max_lag < N = {n}")
    half = kernels.autocorr_1d(np.ascontiguousarray(w.weights), int(max_lag)) / n
    coeffs = np.concatenate([half[:0:-1], half])
    lags = np.arange(-max_lag, max_lag + 1)
    return AutocorrelationEstimate(lags, coeffs, n, w.label, {"origin": w.origin})


def autocorr_2d(c: LatticeConfig2D, max_lag: int | None = None) -> AutocorrelationEstimate:
    """eta(m1, m2) for |m1|, |m2| <= max_lag; m1 along x (columns)."""
    size = c.width * c.height
    if max_lag is None:
        max_lag = max(1, min(16, min(c.width, c.height) // 16))
    if max_lag < 0 or max_lag >= min(c.width, c.height):
        raise InvalidInput("max_lag must be smaller than both sides of the configuration")
    sums = kernels.autocorr_2d(np.ascontiguousarray(c.weights), int(max_lag)) / size
    M = max_lag
    dy, dx = np.meshgrid(np.arange(-M, M + 1), np.arange(-M, M + 1), indexing="ij")
    # row-major over (m1, m2): transpose the (dy, dx) table
    lags = np.stack([dx.T.ravel(), dy.T.ravel()], axis=1)
    return AutocorrelationEstimate(lags, sums.T.ravel(), size, c.label, {"shape": [c.width, c.height]})


def autocorr_pointset(ps: PointSet2D, max_lag: int = 2) -> AutocorrelationEstimate:
    """Occupancy autocorrelation of a point set, normalised by pi R^2.

    eta(z) counts the points x with both x and x + z in the set.
    """
    if max_lag < 0 or max_lag > ps.radius / 2:
        raise InvalidInput("max_lag must not exceed radius / 2")
    counts = kernels.mask_overlaps(ps.mask(), int(max_lag))
    M = max_lag
    a, b = np.meshgrid(np.arange(-M, M + 1), np.arange(-M, M + 1), indexing="ij")
    lags = np.stack([a.ravel(), b.ravel()], axis=1)
    coeffs = counts.ravel() / (np.pi * ps.radius**2)
    return AutocorrelationEstimate(lags, coeffs, len(ps), ps.label, {"radius": ps.radius})
