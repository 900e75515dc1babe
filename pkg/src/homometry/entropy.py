"""Configurational entropy estimators (all values in bits)."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from . import rng as _rng
from .combs import LatticeConfig2D, SequenceWindow
from .errors import InvalidInput
from .rng import SeededRng, as_rng

MIN_SAMPLES_PER_BLOCK = 8
MAX_PATCH_L = 6
MIN_PATCH_SAMPLES = 1000


@dataclass(frozen=True, eq=False)
class EntropyReport:
    block_lengths: np.ndarray
    block_entropies: np.ndarray = field(default_factory=lambda: np.zeros(0))
    rate_estimates: np.ndarray = field(default_factory=lambda: np.zeros(0))
    patch_counts: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    samples: int = 0
    label: str = ""

    def rate_at(self, L: int) -> float:
        """Conditional entropy ``H_{L+1} - H_L``."""
        i = int(np.searchsorted(self.block_lengths, L))
        if i >= len(self.rate_estimates) or self.block_lengths[i] != L:
            raise KeyError(f"no rate estimate at L={L}")
        return float(self.rate_estimates[i])


def _bits(w: SequenceWindow) -> np.ndarray:
    vals = np.unique(w.weights)
    if vals.size > 2:
        raise InvalidInput("block entropy needs a two-letter sequence")
    return (w.weights == vals[-1]).astype(np.uint8) if vals.size == 2 else np.zeros(len(w), np.uint8)


def _shannon_bits(codes: np.ndarray) -> tuple[float, int]:
    _, counts = np.unique(codes, return_counts=True)
    p = counts / codes.size
    return float(-(p * np.log2(p)).sum()) + 0.0, counts.size


def block_entropy(w: SequenceWindow, max_L: int) -> EntropyReport:
    """Sliding-window block entropies ``H_1 .. H_maxL`` and rates ``H_{L+1} - H_L``.

    Rates are reported for ``L = 1 .. maxL - 1``.  Refuses (InvalidInput)
    when ``maxL > log2(N) + 4`` or when some block length has fewer than
    eight samples per observed block type.
    """
    n = len(w)
    if max_L < 1 or max_L > math.log2(n) + 4 or max_L > 62:
        raise InvalidInput(f"max_L must be in [1, log2(N)+4] for N={n}")
    bits = np.ascontiguousarray(_bits(w))
    H = np.empty(max_L)
    for L in range(1, max_L + 1):
        if L > n:
            raise InvalidInput("block length exceeds the window")
        codes = kernels.sliding_codes(bits, L)
        H[L - 1], distinct = _shannon_bits(codes)
        if codes.size < MIN_SAMPLES_PER_BLOCK * distinct:
            raise InvalidInput(
                f"undersampled at L={L}: {codes.size} samples for {distinct} block types")
    return EntropyReport(np.arange(1, max_L + 1), H, np.diff(H), samples=n, label=w.label)


def max_admissible_L(w: SequenceWindow, cap: int = 62,
                     samples_per_block: int = MIN_SAMPLES_PER_BLOCK) -> int:
    """Largest L whose block census still has ``samples_per_block`` samples per type."""
    n = len(w)
    bits = np.ascontiguousarray(_bits(w))
    best = 0
    for L in range(1, min(cap, int(math.log2(n) + 4), n) + 1):
        codes = kernels.sliding_codes(bits, L)
        if codes.size < samples_per_block * np.unique(codes).size:
            break
        best = L
    return best


RATE_SAMPLES_PER_BLOCK = 64
RATE_MAX_L = 15


def entropy_rate(w: SequenceWindow, max_L: int = RATE_MAX_L,
                 samples_per_block: int = RATE_SAMPLES_PER_BLOCK) -> tuple[int, float]:
    """``(L, H_{L+1} - H_L)`` at the largest L the sample supports.

    L is capped at ``max_L`` and chosen so that the (L+1)-block census has at
    least ``samples_per_block`` samples per observed type, which keeps the
    plug-in bias of random sequences below about 0.01 bit while letting
    low-complexity sequences reach long blocks.
    """
    top = max_admissible_L(w, cap=max_L + 1, samples_per_block=samples_per_block)
    if top < 2:
        raise InvalidInput("window too short for a rate estimate")
    rep = block_entropy(w, top)
    L = top - 1
    return L, rep.rate_at(L)


def _binary_entropy(p: float) -> float:
    if p in (0.0, 1.0):
        return 0.0
    return -(p * math.log2(p) + (1 - p) * math.log2(1 - p))


def entropy_reference(system: str, p: float | None = None, q: float | None = None) -> float:
    """Known entropy per site in bits.

    bernoulli (and bernoullised-rs): H(p)/log 2; dimer: 1/2; rs: 0;
    meyer: H(q)/2 (only odd sites are free).
    """
    if system in ("bernoulli", "bernoullised-rs"):
        if p is None or not 0 <= p <= 1:
            raise InvalidInput("bernoulli entropy needs p in [0, 1]")
        return _binary_entropy(float(p))
    if system == "dimer":
        return 0.5
    if system == "rs":
        return 0.0
    if system == "meyer":
        if q is None or not 0 <= q <= 1:
            raise InvalidInput("meyer entropy needs q in [0, 1]")
        return _binary_entropy(float(q)) / 2
    raise InvalidInput(f"no reference entropy for system {system!r}")


def patch_census_2d(c: LatticeConfig2D, max_L: int, samples: int = 10_000,
                    rng: SeededRng | None = None, exhaustive: bool = False) -> EntropyReport:
    """Number of distinct L x L sub-patches for L = 1 .. max_L.

    Positions are drawn uniformly (with replacement) from the admissible
    corners unless ``exhaustive`` is set, in which case every corner is used.
    """
    if max_L < 1 or max_L > MAX_PATCH_L:
        raise InvalidInput(f"max_L must be in [1, {MAX_PATCH_L}]")
    if samples < MIN_PATCH_SAMPLES and not exhaustive:
        raise InvalidInput(f"need at least {MIN_PATCH_SAMPLES} samples")
    if c.width < max_L or c.height < max_L:
        raise InvalidInput("configuration smaller than the largest patch")
    bits = np.ascontiguousarray((c.weights > 0).astype(np.uint8))
    r = as_rng(rng)
    counts = np.empty(max_L, dtype=np.int64)
    used = 0
    for L in range(1, max_L + 1):
        ny, nx = c.height - L + 1, c.width - L + 1
        if exhaustive:
            ys, xs = np.divmod(np.arange(ny * nx, dtype=np.int64), nx)
        else:
            u = r.uniform(2 * samples, _rng.VALUES + L)
            ys = np.minimum((u[:samples] * ny).astype(np.int64), ny - 1)
            xs = np.minimum((u[samples:] * nx).astype(np.int64), nx - 1)
        codes = kernels.patch_codes(bits, L, np.ascontiguousarray(ys), np.ascontiguousarray(xs))
        counts[L - 1] = np.unique(codes).size
        used = max(used, ys.size)
    return EntropyReport(np.arange(1, max_L + 1), patch_counts=counts, samples=used, label=c.label)


def _fit_ssr(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    A = np.stack([np.ones_like(x), x], axis=1)
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    return float(resid @ resid), float(coef[1])


def rank1_test(report: EntropyReport, saturation: float = 0.25) -> str:
    """Classify patch-count growth as ``rank1``, ``full-rank`` or ``degenerate``.

    log2(count) is regressed on L and on L^2.  Levels whose count reaches
    ``saturation * samples`` are dropped first, since there the census is
    limited by the number of sampled positions rather than by the system.
    Linear growth with slope in [1, 2.5] is rank 1; a better L^2 fit or a
    steeper slope is full rank; sub-linear or saturated growth (at most two
    patches) is degenerate.
    """
    counts = np.asarray(report.patch_counts, dtype=float)
    if counts.size == 0:
        raise InvalidInput("report carries no patch counts")
    if counts.max() <= 2:
        return "degenerate"
    L = np.asarray(report.block_lengths, dtype=float)
    ok = counts < saturation * report.samples if report.samples else np.ones_like(counts, bool)
    if ok.sum() >= 3:
        L, counts = L[ok], counts[ok]
    y = np.log2(counts)
    ssr_lin, slope = _fit_ssr(L, y)
    ssr_quad, _ = _fit_ssr(L**2, y)
    if ssr_lin <= ssr_quad + 1e-12:
        if 1.0 <= slope <= 2.5:
            return "rank1"
        return "full-rank" if slope > 2.5 else "degenerate"
    return "full-rank"
