"""Finite windows of weighted Dirac combs on Z, Z^2 and subsets of Z^2.

All containers are frozen; the weight arrays are marked read-only so that a
window can be shared between estimators (and threads) without copying.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInput


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.float64, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SequenceWindow:
    """Weights ``w(n)`` on the consecutive sites ``origin .. origin+N-1``."""

    origin: int
    weights: np.ndarray
    label: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 1 or w.size == 0:
            raise InvalidInput("weights must be a non-empty 1D array")
        if not np.all(np.isfinite(w)):
            raise InvalidInput("weights must be finite")
        object.__setattr__(self, "origin", int(self.origin))
        object.__setattr__(self, "weights", _frozen(w))

    def __len__(self) -> int:
        return self.weights.size

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.origin, self.origin + len(self), dtype=np.int64)

    def __getitem__(self, n: int) -> float:
        i = n - self.origin
        if not 0 <= i < len(self):
            raise IndexError(f"site {n} outside window [{self.origin}, {self.origin + len(self)})")
        return float(self.weights[i])

    def is_spin(self) -> bool:
        return bool(np.all(np.abs(self.weights) == 1.0))

    def is_occupancy(self) -> bool:
        return bool(np.all((self.weights == 0.0) | (self.weights == 1.0)))

    def __eq__(self, other):
        if not isinstance(other, SequenceWindow):
            return NotImplemented
        return (
            self.origin == other.origin
            and self.label == other.label
            and np.array_equal(self.weights, other.weights)
        )


@dataclass(frozen=True, eq=False)
class LatticeConfig2D:
    """±1 weights on a W x H rectangle of Z^2.

    ``weights[y, x]`` is the weight at site ``(origin[0] + x, origin[1] + y)``,
    i.e. the array has H rows and W columns.
    """

    origin: tuple[int, int]
    weights: np.ndarray
    label: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 2 or w.shape[0] < 1 or w.shape[1] < 1:
            raise InvalidInput("weights must be a non-empty 2D array")
        if not np.all(np.abs(w) == 1.0):
            raise InvalidInput("lattice configurations must be ±1 valued")
        object.__setattr__(self, "origin", (int(self.origin[0]), int(self.origin[1])))
        object.__setattr__(self, "weights", _frozen(w))

    @property
    def width(self) -> int:
        return self.weights.shape[1]

    @property
    def height(self) -> int:
        return self.weights.shape[0]

    def __getitem__(self, site: tuple[int, int]) -> float:
        x = site[0] - self.origin[0]
        y = site[1] - self.origin[1]
        if not (0 <= x < self.width and 0 <= y < self.height):
            raise IndexError(f"site {site} outside configuration")
        return float(self.weights[y, x])

    def ledrappier_violations(self) -> int:
        """Number of sites where ``w(x) w(x+e1) w(x+e2) != 1``."""
        w = self.weights
        prod = w[:-1, :-1] * w[:-1, 1:] * w[1:, :-1]
        return int(np.count_nonzero(prod != 1.0))

    def __eq__(self, other):
        if not isinstance(other, LatticeConfig2D):
            return NotImplemented
        return (
            self.origin == other.origin
            and self.label == other.label
            and np.array_equal(self.weights, other.weights)
        )


@dataclass(frozen=True, eq=False)
class PointSet2D:
    """A finite subset of Z^2 inside the closed disc of radius ``radius``."""

    points: np.ndarray
    radius: float
    label: str = ""

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.int64).reshape(-1, 2)
        if self.radius <= 0:
            raise InvalidInput("radius must be positive")
        r2 = pts[:, 0] ** 2 + pts[:, 1] ** 2
        if np.any(r2 > self.radius**2):
            raise InvalidInput("points outside the generation disc")
        pts = np.ascontiguousarray(pts)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "radius", float(self.radius))

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def extent(self) -> int:
        """Half-width of the smallest centred square containing the disc."""
        return int(np.floor(self.radius))

    def mask(self) -> np.ndarray:
        """Occupancy array indexed ``[m + extent, n + extent]``."""
        e = self.extent
        out = np.zeros((2 * e + 1, 2 * e + 1), dtype=np.uint8)
        out[self.points[:, 0] + e, self.points[:, 1] + e] = 1
        return out

    def as_set(self) -> set[tuple[int, int]]:
        return {(int(a), int(b)) for a, b in self.points}


def make_window(origin: int, weights, label: str = "") -> SequenceWindow:
    w = np.asarray(weights, dtype=np.float64)
    if w.size == 0:
        raise InvalidInput("empty weight array")
    return SequenceWindow(origin, w, label)


def tensor_product(a: SequenceWindow, b: SequenceWindow) -> LatticeConfig2D:
    """Product configuration ``c(m, n) = a(m) b(n)``.

    ``a`` runs along the columns (x direction), ``b`` along the rows.
    """
    if not (a.is_spin() and b.is_spin()):
        raise InvalidInput("tensor_product needs ±1-valued windows")
    return LatticeConfig2D(
        (a.origin, b.origin),
        np.outer(b.weights, a.weights),
        label=f"{a.label}x{b.label}" if (a.label or b.label) else "",
    )
