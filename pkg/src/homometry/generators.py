"""Seeded constructors for every system studied here.

Each generator is a pure function of its arguments and a :class:`SeededRng`.
Random draws come from per-purpose counter streams (see :mod:`homometry.rng`)
so that a longer window extends a shorter one with the same seed.
"""
from __future__ import annotations

import numpy as np

from . import kernels
from . import rng as _rng
from .combs import LatticeConfig2D, PointSet2D, SequenceWindow, tensor_product
from .errors import InvalidInput
from .rng import SeededRng, as_rng

SYSTEMS = (
    "bernoulli",
    "rs",
    "bernoullised-rs",
    "dimer",
    "dimer-factor",
    "ledrappier",
    "visible",
    "meyer",
    "rs2d",
)


def _check_prob(p: float, name: str = "p") -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise InvalidInput(f"{name} must lie in [0, 1], got {p}")
    return p


def _fair_signs(u: np.ndarray) -> np.ndarray:
    return np.where(u < 0.5, 1.0, -1.0)


def gen_bernoulli(n: int, p: float, rng: SeededRng | None = None) -> SequenceWindow:
    """i.i.d. ±1 weights on ``[0, n)``, +1 with probability ``p``."""
    p = _check_prob(p)
    if n < 1:
        raise InvalidInput("n must be positive")
    r = as_rng(rng)
    u = r.uniform(n, _rng.VALUES)
    w = np.where(u < p, 1.0, -1.0)
    return SequenceWindow(0, w, "bernoulli", {"p": p, "seed": r.seed, "stream": r.stream_id})


def rudin_shapiro_values(idx) -> np.ndarray:
    """Rudin-Shapiro weights at arbitrary integer sites.

    Applies ``w(4n+l) = w(n)`` (l = 0, 1) and ``w(4n+l) = (-1)^(n+l) w(n)``
    (l = 2, 3) with Euclidean remainder until every index reaches one of the
    anchors ``w(-1) = -1``, ``w(0) = 1``.
    """
    m = np.array(idx, dtype=np.int64, ndmin=1)
    sign = np.ones(m.shape, dtype=np.int64)
    active = (m != 0) & (m != -1)
    while np.any(active):
        q, l = np.divmod(m[active], 4)
        flip = (l >= 2) & (((q + l) & 1) == 1)
        s = sign[active]
        s[flip] = -s[flip]
        sign[active] = s
        m[active] = q
        active = (m != 0) & (m != -1)
    return np.where(m == -1, -sign, sign).astype(np.float64)


def gen_rudin_shapiro(lo: int, hi: int) -> SequenceWindow:
    """Rudin-Shapiro window on the closed range ``[lo, hi]``."""
    if lo > hi:
        raise InvalidInput("lo must not exceed hi")
    return SequenceWindow(lo, rudin_shapiro_values(np.arange(lo, hi + 1)), "rs")


def bernoullise(base: SequenceWindow, p: float, rng: SeededRng | None = None) -> SequenceWindow:
    """Keep each sign with probability ``p``, flip it otherwise."""
    p = _check_prob(p)
    if not base.is_spin():
        raise InvalidInput("bernoullise needs a ±1-valued window")
    r = as_rng(rng)
    u = r.uniform(len(base), _rng.FLIPS)
    x = np.where(u < p, 1.0, -1.0)
    meta = dict(base.meta, p=p, seed=r.seed, stream=r.stream_id)
    return SequenceWindow(base.origin, base.weights * x, f"bernoullised-{base.label}", meta)


def gen_dimer(n: int, rng: SeededRng | None = None) -> SequenceWindow:
    """Close-packed dimers on ``[0, n)`` decorated with (1,-1) or (-1,1).

    A parity offset ``o`` is drawn once and dimer ``j`` occupies the sites
    ``2j + o`` and ``2j + o + 1``.  A half-dimer cut by the right edge shows the
    first entry of its own (fair) decoration; one cut by the left edge gets an
    independent fair sign from a separate stream.  ``meta['parity']`` records
    ``o``.
    """
    if n < 2 or n % 2:
        raise InvalidInput("n must be even and at least 2")
    r = as_rng(rng)
    offset = int(r.uniform(1, _rng.PARITY)[0] < 0.5)
    ndimers = (n - offset + 1) // 2
    signs = _fair_signs(r.uniform(ndimers, _rng.SIGNS))
    pairs = np.empty(2 * ndimers)
    pairs[0::2] = signs
    pairs[1::2] = -signs
    w = np.empty(n)
    if offset:
        w[0] = _fair_signs(r.uniform(1, _rng.EDGE))[0]
    w[offset:] = pairs[: n - offset]
    return SequenceWindow(0, w, "dimer", {"parity": offset, "seed": r.seed, "stream": r.stream_id})


def dimer_factor(w: SequenceWindow) -> SequenceWindow:
    """Sliding block map ``v(n) = -w(n) w(n+1)``."""
    if len(w) < 2:
        raise InvalidInput("need at least two sites")
    if not w.is_spin():
        raise InvalidInput("dimer_factor needs a ±1-valued window")
    a = w.weights
    return SequenceWindow(w.origin, -a[:-1] * a[1:], "dimer-factor", dict(w.meta))


def gen_ledrappier(width: int, height: int, rng: SeededRng | None = None,
                   bottom_row=None) -> LatticeConfig2D:
    """Patch of the Ledrappier shift under its Haar measure.

    The bottom row is extended to ``width + height - 1`` fair signs; row
    ``y + 1`` is ``row_y[:-1] * row_y[1:]``.  ``bottom_row`` overrides the
    random boundary (for tests and enumeration).
    """
    if width < 1 or height < 1:
        raise InvalidInput("width and height must be positive")
    if bottom_row is None:
        r = as_rng(rng)
        row = _fair_signs(r.uniform(width + height - 1, _rng.BOUNDARY))
        meta = {"seed": r.seed, "stream": r.stream_id}
    else:
        row = np.asarray(bottom_row, dtype=np.float64)
        if row.size != width + height - 1:
            raise InvalidInput("bottom_row must have width + height - 1 entries")
        meta = {}
    out = np.empty((height, width))
    for y in range(height):
        out[y] = row[:width]
        row = row[:-1] * row[1:]
    return LatticeConfig2D((0, 0), out, "ledrappier", meta)


def gen_iid_2d(width: int, height: int, rng: SeededRng | None = None) -> LatticeConfig2D:
    """Full-shift control: i.i.d. fair ±1 on a rectangle."""
    if width < 1 or height < 1:
        raise InvalidInput("width and height must be positive")
    r = as_rng(rng)
    w = _fair_signs(r.uniform(width * height, _rng.VALUES)).reshape(height, width)
    return LatticeConfig2D((0, 0), w, "iid2d", {"seed": r.seed, "stream": r.stream_id})


def gen_rs2d(width: int, height: int) -> LatticeConfig2D:
    """Product of two Rudin-Shapiro chains on ``[0, width) x [0, height)``."""
    return tensor_product(gen_rudin_shapiro(0, width - 1), gen_rudin_shapiro(0, height - 1))


def gen_visible(radius: float) -> PointSet2D:
    """Visible lattice points ``gcd(m, n) = 1`` in the closed disc."""
    if radius < 1:
        raise InvalidInput("radius must be at least 1")
    e = int(np.floor(radius))
    mask = kernels.visible_mask(e, float(radius))
    m, n = np.nonzero(mask)
    pts = np.stack([m - e, n - e], axis=1).astype(np.int64)
    return PointSet2D(pts, radius, "visible")


def gen_meyer_example(n: int, q: float, rng: SeededRng | None = None) -> SequenceWindow:
    """Occupancy of 2Z plus each odd site independently with probability ``q``."""
    q = _check_prob(q, "q")
    if n < 1:
        raise InvalidInput("n must be positive")
    r = as_rng(rng)
    u = r.uniform(n, _rng.VALUES)
    w = np.ones(n)
    odd = np.arange(n) % 2 == 1
    w[odd] = (u[odd] < q).astype(np.float64)
    return SequenceWindow(0, w, "meyer", {"q": q, "seed": r.seed, "stream": r.stream_id})


def generate(system: str, *, n: int = 65536, lo: int = 0, hi: int | None = None,
             width: int = 256, height: int = 256, radius: float = 100.0,
             p: float = 0.5, q: float = 0.5, seed: int = 0, stream: int = 0):
    """Dispatch by system name (the names accepted on the command line)."""
    r = SeededRng(seed, stream)
    if system == "bernoulli":
        return gen_bernoulli(n, p, r)
    if system == "rs":
        return gen_rudin_shapiro(lo, lo + n - 1 if hi is None else hi)
    if system == "bernoullised-rs":
        return bernoullise(gen_rudin_shapiro(lo, lo + n - 1 if hi is None else hi), p, r)
    if system == "dimer":
        return gen_dimer(n, r)
    if system == "dimer-factor":
        v = dimer_factor(gen_dimer(n + 2, r))
        return SequenceWindow(v.origin, v.weights[:n], v.label, v.meta)
    if system == "ledrappier":
        return gen_ledrappier(width, height, r)
    if system == "visible":
        return gen_visible(radius)
    if system == "meyer":
        return gen_meyer_example(n, q, r)
    if system == "rs2d":
        return gen_rs2d(width, height)
    raise InvalidInput(f"unknown system {system!r}; valid names: {', '.join(SYSTEMS)}")
